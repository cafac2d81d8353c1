#include <doctest.h>

#include <cmath>

#include "tivm/csv.hpp"
#include "tivm/error.hpp"
#include "tivm/experiments.hpp"
#include "tivm/random.hpp"

using namespace tivm;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a tivm::Error");
  return ErrorCode::InvalidArgument;
}

const SparsityRow& row(const std::vector<SparsityRow>& rows, WriteProtocol p, std::size_t step) {
  for (const auto& r : rows)
    if (r.protocol == p && r.write_step == step) return r;
  FAIL("missing row");
  return rows.front();
}

}  // namespace

TEST_CASE("experiment names and defaults") {
  CHECK(parse_experiment("decay") == ExperimentKind::Decay);
  CHECK_FALSE(parse_experiment("Decay").has_value());
  CHECK(default_csv_name(ExperimentKind::Invariance) == "invariance.csv");
  const auto c = default_config(ExperimentKind::Sparsity);
  CHECK(c.writes_per_tensor == 5);
  CHECK(c.write_rate == 5.0);
  CHECK(c.read_rate == 5.0);
  CHECK(c.shape == Shape{8, 8, 8});
  CHECK(c.rate_sweep == std::vector<double>{1.0, 0.2});
  CHECK(default_config(ExperimentKind::Capacity).capacities == std::vector<std::size_t>{2, 100});
}

TEST_CASE("config validation") {
  auto c = default_config(ExperimentKind::Sparsity);
  c.writes_per_tensor = 0;
  CHECK(code_of([&] { run_sparsity(c); }) == ErrorCode::InvalidArgument);
  c = default_config(ExperimentKind::Decay);
  c.rate_sweep = {1.0, -1.0};
  CHECK(code_of([&] { run_decay(c); }) == ErrorCode::InvalidRate);
  c.rate_sweep.clear();
  CHECK(code_of([&] { run_decay(c); }) == ErrorCode::InvalidArgument);
  c = default_config(ExperimentKind::Capacity);
  CHECK(code_of([&] { run_capacity(c, {}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { run_capacity(c, {0}); }) == ErrorCode::InvalidCapacity);
  c = default_config(ExperimentKind::Invariance);
  CHECK(code_of([&] { run_invariance(c, {}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("random tensors are seeded") {
  const Shape s{8, 8, 8};
  CHECK(random_tensor(s, 3) == random_tensor(s, 3));
  CHECK_FALSE(random_tensor(s, 3) == random_tensor(s, 4));
  CHECK(std::abs(cosine_similarity(random_tensor(s, 3), random_tensor(s, 4))) < 0.2);
}

TEST_CASE("sparsity experiment") {
  const auto rows = run_sparsity(default_config(ExperimentKind::Sparsity));
  CHECK(rows.size() == 20);
  CHECK(row(rows, WriteProtocol::Tangent, 5).acc_f1 >= 0.99);
  CHECK(row(rows, WriteProtocol::Tangent, 10).acc_f1 >= 0.9);
  CHECK(row(rows, WriteProtocol::Baseline, 10).acc_f1 < row(rows, WriteProtocol::Tangent, 10).acc_f1);
  for (WriteProtocol p : {WriteProtocol::Tangent, WriteProtocol::Baseline}) {
    CHECK(row(rows, p, 5).acc_f1 >= 0.95);
    CHECK(row(rows, p, 10).acc_f2 >= 0.95);
  }
}

TEST_CASE("capacity experiment") {
  auto config = default_config(ExperimentKind::Capacity);
  const auto rows = run_capacity(config, config.capacities);
  REQUIRE(rows.size() == 20);
  auto acc = [&](std::size_t cap, std::size_t step) {
    for (const auto& r : rows)
      if (r.capacity == cap && r.write_step == step) return r;
    FAIL("missing row");
    return rows.front();
  };
  const double drop2 = acc(2, 5).acc_f1 - acc(2, 10).acc_f1;
  const double drop100 = acc(100, 5).acc_f1 - acc(100, 10).acc_f1;
  CHECK(drop2 > drop100);
  CHECK(acc(2, 10).acc_f2 >= 0.95);
  CHECK(acc(100, 10).acc_f2 >= 0.95);
}

TEST_CASE("capacity one overwrites the single cube") {
  auto config = default_config(ExperimentKind::Capacity);
  const auto rows = run_capacity(config, {1});
  const auto f1 = random_tensor(config.shape, derive_seed(config.seed, 2));
  const auto f2 = random_tensor(config.shape, derive_seed(config.seed, 3));
  // With one cube the bank holds f2 after step 10 and WTI reads it back whole.
  CHECK(std::abs(rows.back().acc_f2 - 1.0) < 1e-6);
  CHECK(std::abs(rows.back().acc_f1 - xcorr_similarity(f1, f2).score) < 1e-5);
}

TEST_CASE("invariance experiment") {
  auto config = default_config(ExperimentKind::Invariance);
  const auto rows = run_invariance(config, config.shifts);
  REQUIRE(rows.size() == 12);
  double wti_min = 1.0, woti_min = 1.0;
  for (const auto& r : rows) {
    if (r.frame == 1) CHECK(r.confidence < 0.5);
    if (r.frame < 2) continue;
    if (r.mode == ReadMode::WTI) {
      CHECK(r.confidence >= 0.95);
      wti_min = std::min(wti_min, r.confidence);
    } else {
      woti_min = std::min(woti_min, r.confidence);
    }
  }
  CHECK(woti_min < wti_min);
}

TEST_CASE("decay experiment") {
  const auto rows = run_decay(default_config(ExperimentKind::Decay));
  REQUIRE(rows.size() == 20);
  std::vector<double> fast, slow;
  for (const auto& r : rows) (r.write_rate == 1.0 ? fast : slow).push_back(r.interest);
  REQUIRE(fast.size() == 10);
  CHECK(fast[0] == slow[0]);
  for (std::size_t t = 1; t < 10; ++t) {
    CHECK(fast[t] <= slow[t] + 1e-6);
    CHECK(fast[t] <= fast[t - 1] + 1e-6);
    CHECK(slow[t] <= slow[t - 1] + 1e-6);
  }
}

TEST_CASE("experiment CSVs are deterministic") {
  for (auto kind : {ExperimentKind::Sparsity, ExperimentKind::Capacity, ExperimentKind::Invariance,
                    ExperimentKind::Decay}) {
    const auto config = default_config(kind);
    const auto a = run_experiment_csv(kind, config);
    CHECK(a == run_experiment_csv(kind, config));
    auto other = config;
    other.seed = 1;
    CHECK(a != run_experiment_csv(kind, other));
  }
  const auto table = parse_csv(run_experiment_csv(ExperimentKind::Sparsity, default_config(ExperimentKind::Sparsity)));
  CHECK(table.header == std::vector<std::string>{"protocol", "write_step", "acc_f1", "acc_f2"});
  CHECK(parse_csv(run_experiment_csv(ExperimentKind::Capacity, default_config(ExperimentKind::Capacity))).header ==
        std::vector<std::string>{"capacity", "write_step", "acc_f1", "acc_f2"});
  CHECK(parse_csv(run_experiment_csv(ExperimentKind::Invariance, default_config(ExperimentKind::Invariance))).header ==
        std::vector<std::string>{"frame", "mode", "confidence"});
  CHECK(parse_csv(run_experiment_csv(ExperimentKind::Decay, default_config(ExperimentKind::Decay))).header ==
        std::vector<std::string>{"frame", "write_rate", "interest"});
}
