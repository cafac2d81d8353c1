#include "tivm/experiments.hpp"

#include <cmath>

#include "tivm/csv.hpp"
#include "tivm/error.hpp"
#include "tivm/pipeline.hpp"
#include "tivm/random.hpp"

namespace tivm {
namespace {

// Stream keys under the experiment seed.
constexpr std::uint64_t kBankStream = 1;
constexpr std::uint64_t kTensorStream = 2;

MemoryBank initial_bank(const ExperimentConfig& config, std::size_t capacity) {
  return MemoryBank::create(capacity, config.shape, derive_seed(config.seed, kBankStream), config.write_rate,
                            config.read_rate);
}

struct TensorPair {
  FeatureCube first;
  FeatureCube second;
};

TensorPair tensor_pair(const ExperimentConfig& config) {
  return {random_tensor(config.shape, derive_seed(config.seed, kTensorStream)),
          random_tensor(config.shape, derive_seed(config.seed, kTensorStream + 1))};
}

template <typename Record>
void two_tensor_schedule(MemoryBank bank, const TensorPair& tensors, const ExperimentConfig& config,
                         WriteProtocol protocol, Record&& record) {
  const std::size_t steps = 2 * config.writes_per_tensor;
  for (std::size_t step = 1; step <= steps; ++step) {
    const FeatureCube& x = step <= config.writes_per_tensor ? tensors.first : tensors.second;
    write_with(bank, x, protocol, config.write_rate);
    const double acc_f1 = reading_accuracy(bank.read(tensors.first, config.mode).recall, tensors.first);
    const double acc_f2 = reading_accuracy(bank.read(tensors.second, config.mode).recall, tensors.second);
    record(step, acc_f1, acc_f2);
  }
}

}  // namespace

std::optional<ExperimentKind> parse_experiment(std::string_view name) {
  if (name == "sparsity") return ExperimentKind::Sparsity;
  if (name == "capacity") return ExperimentKind::Capacity;
  if (name == "invariance") return ExperimentKind::Invariance;
  if (name == "decay") return ExperimentKind::Decay;
  return std::nullopt;
}

const char* to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::Sparsity: return "sparsity";
    case ExperimentKind::Capacity: return "capacity";
    case ExperimentKind::Invariance: return "invariance";
    case ExperimentKind::Decay: return "decay";
  }
  return "unknown";
}

std::string default_csv_name(ExperimentKind kind) { return std::string(to_string(kind)) + ".csv"; }

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig config;
  if (kind == ExperimentKind::Sparsity) config.capacity = 20;
  if (kind == ExperimentKind::Invariance) config.capacity = 1;
  if (kind == ExperimentKind::Decay) config.capacity = 2;
  return config;
}

void validate(const ExperimentConfig& config) {
  if (config.capacity == 0) fail(ErrorCode::InvalidCapacity, "experiment capacity must be >= 1");
  if (config.shape.size() == 0) fail(ErrorCode::InvalidArgument, "experiment shape must be >= 1 in every dim");
  if (config.writes_per_tensor == 0 || config.repeats == 0)
    fail(ErrorCode::InvalidArgument, "experiment counts must be >= 1");
  for (double rate : {config.write_rate, config.read_rate})
    if (!(rate > 0.0) || !std::isfinite(rate)) fail(ErrorCode::InvalidRate, "experiment rates must be > 0");
  for (double rate : config.rate_sweep)
    if (!(rate > 0.0) || !std::isfinite(rate)) fail(ErrorCode::InvalidRate, "swept write rates must be > 0");
}

FeatureCube random_tensor(const Shape& shape, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> values(shape.size());
  for (float& v : values) v = static_cast<float>(rng.normal());
  return FeatureCube(shape, std::move(values));
}

std::vector<SparsityRow> run_sparsity(const ExperimentConfig& config) {
  validate(config);
  const TensorPair tensors = tensor_pair(config);
  const MemoryBank bank = initial_bank(config, config.capacity);
  std::vector<SparsityRow> rows;
  for (WriteProtocol protocol : {WriteProtocol::Tangent, WriteProtocol::Baseline})
    two_tensor_schedule(bank, tensors, config, protocol, [&](std::size_t step, double a1, double a2) {
      rows.push_back({protocol, step, a1, a2});
    });
  return rows;
}

std::vector<CapacityRow> run_capacity(const ExperimentConfig& config, const std::vector<std::size_t>& capacities) {
  validate(config);
  if (capacities.empty()) fail(ErrorCode::InvalidArgument, "capacity sweep is empty");
  const TensorPair tensors = tensor_pair(config);
  std::vector<CapacityRow> rows;
  for (std::size_t capacity : capacities)
    two_tensor_schedule(initial_bank(config, capacity), tensors, config, config.protocol,
                        [&](std::size_t step, double a1, double a2) { rows.push_back({capacity, step, a1, a2}); });
  return rows;
}

std::vector<InvarianceRow> run_invariance(const ExperimentConfig& config, const std::vector<ShiftIndex>& shifts) {
  validate(config);
  if (shifts.empty()) fail(ErrorCode::InvalidArgument, "shift list is empty");
  const FeatureCube base = random_tensor(config.shape, derive_seed(config.seed, kTensorStream));
  std::vector<FeatureCube> stream{base};
  for (const auto& s : shifts) stream.push_back(circular_translate(base, s));

  const MemoryBank initial = initial_bank(config, config.capacity);
  std::vector<InvarianceRow> rows;
  for (ReadMode mode : {ReadMode::WTI, ReadMode::WOTI}) {
    MemoryBank bank = initial;
    const auto scores = online_run(bank, stream, OnlineParams{config.read_rate, config.write_rate, mode});
    for (const auto& score : scores) rows.push_back({score.frame_index + 1, mode, score.confidence});
  }
  return rows;
}

std::vector<DecayRow> run_decay(const ExperimentConfig& config) {
  validate(config);
  if (config.rate_sweep.empty()) fail(ErrorCode::InvalidArgument, "write-rate sweep is empty");
  const FeatureCube frame = random_tensor(config.shape, derive_seed(config.seed, kTensorStream));
  const std::vector<FeatureCube> stream(config.repeats, frame);
  const MemoryBank initial = initial_bank(config, config.capacity);
  std::vector<DecayRow> rows;
  for (double rate : config.rate_sweep) {
    MemoryBank bank = initial;
    const auto scores = online_run(bank, stream, OnlineParams{config.read_rate, rate, config.mode});
    for (const auto& score : scores) rows.push_back({score.frame_index + 1, rate, score.value});
  }
  return rows;
}

std::string format_csv(const std::vector<SparsityRow>& rows) {
  std::string out = "protocol,write_step,acc_f1,acc_f2\n";
  for (const auto& r : rows)
    out += std::string(to_string(r.protocol)) + "," + std::to_string(r.write_step) + "," + format_real(r.acc_f1) +
           "," + format_real(r.acc_f2) + "\n";
  return out;
}

std::string format_csv(const std::vector<CapacityRow>& rows) {
  std::string out = "capacity,write_step,acc_f1,acc_f2\n";
  for (const auto& r : rows)
    out += std::to_string(r.capacity) + "," + std::to_string(r.write_step) + "," + format_real(r.acc_f1) + "," +
           format_real(r.acc_f2) + "\n";
  return out;
}

std::string format_csv(const std::vector<InvarianceRow>& rows) {
  std::string out = "frame,mode,confidence\n";
  for (const auto& r : rows)
    out += std::to_string(r.frame) + "," + to_string(r.mode) + "," + format_real(r.confidence) + "\n";
  return out;
}

std::string format_csv(const std::vector<DecayRow>& rows) {
  std::string out = "frame,write_rate,interest\n";
  for (const auto& r : rows)
    out += std::to_string(r.frame) + "," + format_real(r.write_rate) + "," + format_real(r.interest) + "\n";
  return out;
}

std::string run_experiment_csv(ExperimentKind kind, const ExperimentConfig& config) {
  switch (kind) {
    case ExperimentKind::Sparsity: return format_csv(run_sparsity(config));
    case ExperimentKind::Capacity: return format_csv(run_capacity(config, config.capacities));
    case ExperimentKind::Invariance: return format_csv(run_invariance(config, config.shifts));
    case ExperimentKind::Decay: return format_csv(run_decay(config));
  }
  fail(ErrorCode::InvalidArgument, "unknown experiment");
}

}  // namespace tivm
