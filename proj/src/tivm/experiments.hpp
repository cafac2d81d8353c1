#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tivm/memory.hpp"

namespace tivm {

enum class ExperimentKind { Sparsity, Capacity, Invariance, Decay };

std::optional<ExperimentKind> parse_experiment(std::string_view name);
const char* to_string(ExperimentKind kind) noexcept;
// "sparsity.csv", "capacity.csv", ...
std::string default_csv_name(ExperimentKind kind);

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t capacity = 100;
  Shape shape{8, 8, 8};
  std::size_t writes_per_tensor = 5;
  double write_rate = 5.0;
  double read_rate = 5.0;
  WriteProtocol protocol = WriteProtocol::Tangent;
  ReadMode mode = ReadMode::WTI;
  std::vector<double> rate_sweep{1.0, 0.2};
  std::vector<std::size_t> capacities{2, 100};
  // Offsets of frames 2..k relative to frame 1 in the invariance stream.
  std::vector<ShiftIndex> shifts{{1, 2}, {3, 1}, {5, 5}, {2, 7}, {7, 3}};
  std::size_t repeats = 10;
};

// Defaults per experiment; only the capacity differs (sparsity 20,
// invariance 1, decay 2, capacity sweeps `capacities`). See README.
ExperimentConfig default_config(ExperimentKind kind);

void validate(const ExperimentConfig& config);

// Experiment tensors: i.i.d. standard normal entries.
FeatureCube random_tensor(const Shape& shape, std::uint64_t seed);

struct SparsityRow {
  WriteProtocol protocol;
  std::size_t write_step;
  double acc_f1;
  double acc_f2;
};

struct CapacityRow {
  std::size_t capacity;
  std::size_t write_step;
  double acc_f1;
  double acc_f2;
};

struct InvarianceRow {
  std::size_t frame;
  ReadMode mode;
  double confidence;
};

struct DecayRow {
  std::size_t frame;
  double write_rate;
  double interest;
};

// f1 written writes_per_tensor times, then f2 as often; after every write
// both tensors are read back and scored with reading_accuracy. Runs the
// tangent and the baseline protocol from the same bank and tensors.
std::vector<SparsityRow> run_sparsity(const ExperimentConfig& config);

// The same schedule under config.protocol, once per entry of `capacities`.
std::vector<CapacityRow> run_capacity(const ExperimentConfig& config, const std::vector<std::size_t>& capacities);

// Online run over [f, shift_1(f), shift_2(f), ...] in WTI and WOTI mode from
// identical initial banks.
std::vector<InvarianceRow> run_invariance(const ExperimentConfig& config, const std::vector<ShiftIndex>& shifts);

// Online run over one novel tensor repeated `repeats` times, once per write
// rate in the sweep.
std::vector<DecayRow> run_decay(const ExperimentConfig& config);

std::string format_csv(const std::vector<SparsityRow>& rows);
std::string format_csv(const std::vector<CapacityRow>& rows);
std::string format_csv(const std::vector<InvarianceRow>& rows);
std::string format_csv(const std::vector<DecayRow>& rows);

// Runs `kind` with `config` and returns its CSV document.
std::string run_experiment_csv(ExperimentKind kind, const ExperimentConfig& config);

}  // namespace tivm
