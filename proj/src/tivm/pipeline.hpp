#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tivm/memory.hpp"

namespace tivm {

struct OnlineParams {
  double read_rate = 5.0;
  double write_rate = 5.0;
  ReadMode mode = ReadMode::WTI;
};

// value = (1 - confidence) / 2, so a perfectly recalled frame scores 0 and a
// frame anti-correlated with its recall scores 1.
struct InterestScore {
  double value = 0.0;
  double confidence = 0.0;
  std::size_t frame_index = 0;
};

InterestScore interest_from_confidence(double confidence, std::size_t frame_index);

struct ShortTermReport {
  std::size_t epochs_run = 0;
  std::vector<double> epoch_confidence;
  bool converged = false;
};

// Adapts the bank to known-uninteresting frames. Per frame: writing weights
// from the pre-write bank, write, then read back (write-before-read). Stops
// after the first epoch whose mean read confidence reaches `threshold`.
// Reads use WTI at the bank's read rate; writes use the bank's write rate.
ShortTermReport short_term_train(MemoryBank& bank, std::span<const FeatureCube> frames,
                                 std::size_t max_epochs, double threshold);

// One streaming step: read first, derive interest, then write the frame.
std::pair<InterestScore, ReadResult> online_step(MemoryBank& bank, const FeatureCube& frame,
                                                 const OnlineParams& params, std::size_t index);

// online_step folded over `sequence` in order; frame t never sees t+1.
std::vector<InterestScore> online_run(MemoryBank& bank, std::span<const FeatureCube> sequence,
                                      const OnlineParams& params);

// "frame_index,interest,confidence" with 9 significant digits.
std::string format_scores_csv(std::span<const InterestScore> scores);
std::string format_short_term_csv(const ShortTermReport& report);

// Interest column of a scores CSV, ordered by frame_index. Rows may come in
// any order but must cover 0..N-1 exactly once (IndexOutOfRange otherwise).
std::vector<double> parse_scores_csv(std::string_view text);

}  // namespace tivm
