#include "tivm/pipeline.hpp"

#include <cmath>
#include <string>

#include "tivm/csv.hpp"
#include "tivm/error.hpp"

namespace tivm {
namespace {

void require_params(const OnlineParams& params) {
  if (!(params.read_rate > 0.0) || !std::isfinite(params.read_rate) || !(params.write_rate > 0.0) ||
      !std::isfinite(params.write_rate))
    fail(ErrorCode::InvalidRate, "online rates must be positive and finite");
}

void require_frames(const MemoryBank& bank, std::span<const FeatureCube> frames) {
  if (frames.empty()) fail(ErrorCode::EmptySequence, "frame sequence is empty");
  for (std::size_t i = 0; i < frames.size(); ++i)
    if (frames[i].shape() != bank.shape())
      fail(ErrorCode::ShapeMismatch, "frame " + std::to_string(i) + " is " + to_string(frames[i].shape()) +
                                         ", bank cubes are " + to_string(bank.shape()));
}

}  // namespace

InterestScore interest_from_confidence(double confidence, std::size_t frame_index) {
  return InterestScore{(1.0 - confidence) / 2.0, confidence, frame_index};
}

ShortTermReport short_term_train(MemoryBank& bank, std::span<const FeatureCube> frames,
                                 std::size_t max_epochs, double threshold) {
  if (max_epochs == 0) fail(ErrorCode::InvalidArgument, "max_epochs must be >= 1");
  if (!(threshold > 0.0 && threshold <= 1.0))
    fail(ErrorCode::InvalidArgument, "convergence threshold must lie in (0, 1]");
  require_frames(bank, frames);

  ShortTermReport report;
  for (std::size_t epoch = 0; epoch < max_epochs; ++epoch) {
    double total = 0.0;
    for (const auto& frame : frames) {
      bank.write(frame, write_weights(frame, bank));
      total += bank.read(frame, ReadMode::WTI).confidence;
    }
    const double mean = total / static_cast<double>(frames.size());
    report.epoch_confidence.push_back(mean);
    report.epochs_run = epoch + 1;
    if (mean >= threshold) {
      report.converged = true;
      break;
    }
  }
  return report;
}

std::pair<InterestScore, ReadResult> online_step(MemoryBank& bank, const FeatureCube& frame,
                                                 const OnlineParams& params, std::size_t index) {
  require_params(params);
  ReadResult read = bank.read(frame, params.mode, params.read_rate);
  const InterestScore score = interest_from_confidence(read.confidence, index);
  bank.write(frame, write_weights(frame, bank, params.write_rate));
  return {score, std::move(read)};
}

std::vector<InterestScore> online_run(MemoryBank& bank, std::span<const FeatureCube> sequence,
                                      const OnlineParams& params) {
  require_params(params);
  require_frames(bank, sequence);
  std::vector<InterestScore> scores;
  scores.reserve(sequence.size());
  for (std::size_t t = 0; t < sequence.size(); ++t)
    scores.push_back(online_step(bank, sequence[t], params, t).first);
  return scores;
}

std::string format_scores_csv(std::span<const InterestScore> scores) {
  std::string out = "frame_index,interest,confidence\n";
  for (const auto& s : scores)
    out += std::to_string(s.frame_index) + "," + format_real(s.value) + "," + format_real(s.confidence) + "\n";
  return out;
}

std::string format_short_term_csv(const ShortTermReport& report) {
  std::string out = "epoch,mean_confidence\n";
  for (std::size_t e = 0; e < report.epoch_confidence.size(); ++e)
    out += std::to_string(e + 1) + "," + format_real(report.epoch_confidence[e]) + "\n";
  return out;
}

std::vector<double> parse_scores_csv(std::string_view text) {
  const CsvTable table = parse_csv(text);
  const std::size_t index_col = table.column("frame_index");
  const std::size_t interest_col = table.column("interest");
  const std::size_t n = table.rows.size();
  if (n == 0) fail(ErrorCode::LengthMismatch, "scores CSV has no rows");
  std::vector<double> interest(n, 0.0);
  std::vector<bool> seen(n, false);
  for (const auto& row : table.rows) {
    const long long index = parse_integer(row[index_col], "frame_index");
    if (index < 0 || static_cast<std::size_t>(index) >= n || seen[static_cast<std::size_t>(index)])
      fail(ErrorCode::IndexOutOfRange,
           "scores CSV frame_index " + std::to_string(index) + " is out of range or duplicated");
    const double v = parse_double(row[interest_col], "interest");
    seen[static_cast<std::size_t>(index)] = true;
    interest[static_cast<std::size_t>(index)] = v;
  }
  return interest;
}

}  // namespace tivm
