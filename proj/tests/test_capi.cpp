// Exercises the shared library through its C header only.
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "temp_dir.hpp"
#include "tivm/tivm.h"

namespace {

std::vector<float> gaussian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<float> normal;
  std::vector<float> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("status names and errors") {
  CHECK(std::string(tivm_status_name(TIVM_OK)) == "OK");
  CHECK(std::string(tivm_status_name(TIVM_E_FORMAT)) == "FormatError");
  CHECK(std::string(tivm_version()) == "1.0.0");
  tivm_bank* bank = nullptr;
  CHECK(tivm_bank_create(0, 2, 2, 2, 0, 5, 5, &bank) == TIVM_E_INVALID_CAPACITY);
  CHECK(bank == nullptr);
  CHECK(std::strlen(tivm_last_error()) > 0);
  CHECK(tivm_bank_create(1, 2, 2, 2, 0, 0, 5, &bank) == TIVM_E_INVALID_RATE);
  CHECK(tivm_bank_create(1, 2, 2, 2, 0, 5, 5, nullptr) == TIVM_E_INVALID_ARGUMENT);
  CHECK(tivm_bank_load("/nonexistent/b.tivm", &bank) == TIVM_E_IO);
  const float nan_values[1] = {NAN};
  tivm_cube* cube = nullptr;
  CHECK(tivm_cube_create(1, 1, 1, nan_values, &cube) == TIVM_E_NON_FINITE_DATA);
  tivm_cube_free(nullptr);
  tivm_bank_free(nullptr);
  tivm_sequence_free(nullptr);
}

TEST_CASE("cube operations") {
  std::mt19937_64 rng(1);
  const auto values = gaussian(4 * 8 * 8, rng);
  tivm_cube *x = nullptr, *m = nullptr;
  REQUIRE(tivm_cube_create(4, 8, 8, values.data(), &x) == TIVM_OK);
  REQUIRE(tivm_cube_translate(x, 2, 3, &m) == TIVM_OK);
  double score = 0;
  std::size_t dy = 9, dx = 9;
  CHECK(tivm_xcorr(x, m, &score, &dy, &dx) == TIVM_OK);
  CHECK(std::abs(score - 1.0) < 1e-5);
  CHECK(dy == 6);
  CHECK(dx == 5);
  double cosine = 0, conf = 0;
  CHECK(tivm_cosine(x, x, &cosine) == TIVM_OK);
  CHECK(cosine == doctest::Approx(1.0));
  CHECK(tivm_channel_confidence(x, x, &conf) == TIVM_OK);
  CHECK(conf == doctest::Approx(1.0));
  std::size_t c = 0, h = 0, w = 0;
  CHECK(tivm_cube_shape(m, &c, &h, &w) == TIVM_OK);
  CHECK((c == 4 && h == 8 && w == 8));
  CHECK(std::memcmp(tivm_cube_data(x), values.data(), values.size() * 4) == 0);

  tivm::test::TempDir dir("capi_cube");
  const auto path = (dir / "x.fcb").string();
  CHECK(tivm_cube_save(x, path.c_str()) == TIVM_OK);
  tivm_cube* back = nullptr;
  CHECK(tivm_cube_load(path.c_str(), &back) == TIVM_OK);
  CHECK(std::memcmp(tivm_cube_data(back), values.data(), values.size() * 4) == 0);

  tivm_cube* other = nullptr;
  REQUIRE(tivm_cube_create(4, 8, 4, values.data(), &other) == TIVM_OK);
  CHECK(tivm_cosine(x, other, &cosine) == TIVM_E_SHAPE_MISMATCH);
  tivm_cube_free(x);
  tivm_cube_free(m);
  tivm_cube_free(back);
  tivm_cube_free(other);
}

TEST_CASE("bank lifecycle") {
  std::mt19937_64 rng(2);
  tivm_bank* bank = nullptr;
  REQUIRE(tivm_bank_create(5, 8, 8, 8, 17, 5, 5, &bank) == TIVM_OK);
  tivm_bank_info info{};
  CHECK(tivm_bank_info_get(bank, &info) == TIVM_OK);
  CHECK(info.capacity == 5);
  CHECK(info.seed == 17);
  CHECK(info.read_rate == 5.0);

  const auto values = gaussian(512, rng);
  tivm_cube* x = nullptr;
  REQUIRE(tivm_cube_create(8, 8, 8, values.data(), &x) == TIVM_OK);
  double before = 0, after = 0;
  CHECK(tivm_bank_read(bank, x, TIVM_READ_WTI, 0, &before, nullptr, nullptr) == TIVM_OK);
  for (int k = 0; k < 5; ++k) CHECK(tivm_bank_write(bank, x, TIVM_WRITE_TANGENT, 0) == TIVM_OK);
  tivm_cube* recall = nullptr;
  std::vector<double> weights(5);
  CHECK(tivm_bank_read(bank, x, TIVM_READ_WTI, 0, &after, &recall, weights.data()) == TIVM_OK);
  CHECK(after > before);
  CHECK(after >= 0.95);
  double sum = 0;
  for (double v : weights) sum += v;
  CHECK(sum == doctest::Approx(1.0));
  double check = 0;
  CHECK(tivm_channel_confidence(x, recall, &check) == TIVM_OK);
  CHECK(std::abs(check - after) < 1e-7);

  tivm::test::TempDir dir("capi_bank");
  const auto path = (dir / "b.tivm").string();
  CHECK(tivm_bank_save(bank, path.c_str()) == TIVM_OK);
  tivm_bank* back = nullptr;
  CHECK(tivm_bank_load(path.c_str(), &back) == TIVM_OK);
  const auto again = (dir / "c.tivm").string();
  CHECK(tivm_bank_save(back, again.c_str()) == TIVM_OK);
  CHECK(slurp(path) == slurp(again));

  tivm_cube* cube = nullptr;
  CHECK(tivm_bank_cube(back, 5, &cube) == TIVM_E_INDEX_OUT_OF_RANGE);
  CHECK(tivm_bank_cube(back, 0, &cube) == TIVM_OK);
  CHECK(tivm_bank_set_rates(back, 0.0, 1.0) == TIVM_E_INVALID_RATE);
  CHECK(tivm_bank_write(bank, x, static_cast<tivm_write_protocol>(7), 0) == TIVM_E_INVALID_ARGUMENT);

  tivm_cube_free(cube);
  tivm_cube_free(recall);
  tivm_cube_free(x);
  tivm_bank_free(bank);
  tivm_bank_free(back);
}

TEST_CASE("sequences, online scoring and evaluation") {
  const tivm_extractor spec{TIVM_EXTRACT_RANDPROJ, 8, 8, 4, 3};
  tivm_sequence* seq = nullptr;
  REQUIRE(tivm_sequence_synthesize(&spec, 12, &seq) == TIVM_OK);
  CHECK(tivm_sequence_length(seq) == 12);
  CHECK(tivm_sequence_has_labels(seq) == 0);
  std::uint8_t labels[12];
  CHECK(tivm_sequence_labels(seq, labels) == TIVM_E_LABEL_MISMATCH);

  tivm::test::TempDir dir("capi_seq");
  for (std::size_t i = 0; i < 12; ++i) {
    tivm_cube* frame = nullptr;
    REQUIRE(tivm_sequence_frame(seq, i, &frame) == TIVM_OK);
    char name[32];
    std::snprintf(name, sizeof name, "f%02zu.fcb", i);
    CHECK(tivm_cube_save(frame, (dir / name).string().c_str()) == TIVM_OK);
    tivm_cube_free(frame);
  }
  {
    std::ofstream l(dir / "labels.csv");
    l << "frame_index,interesting\n";
    for (int i = 0; i < 12; ++i) l << i << "," << (i % 4 == 0) << "\n";
  }
  const tivm_extractor pre{TIVM_EXTRACT_PRECOMPUTED, 8, 8, 3, 0};
  tivm_sequence* loaded = nullptr;
  REQUIRE(tivm_sequence_load(dir.path().string().c_str(), (dir / "labels.csv").string().c_str(), &pre, &loaded) ==
          TIVM_OK);
  CHECK(tivm_sequence_length(loaded) == 12);
  CHECK(tivm_sequence_labels(loaded, labels) == TIVM_OK);
  CHECK(labels[4] == 1);
  CHECK(labels[5] == 0);

  tivm_bank* bank = nullptr;
  REQUIRE(tivm_bank_create(6, 4, 8, 8, 1, 5, 5, &bank) == TIVM_OK);
  const tivm_online_params params{5, 5, TIVM_READ_WTI};
  std::vector<double> interest(12), confidence(12);
  const auto scores = (dir / "scores.csv").string();
  CHECK(tivm_online_run(bank, loaded, &params, interest.data(), confidence.data(), scores.c_str()) == TIVM_OK);
  for (std::size_t t = 0; t < 12; ++t) CHECK(interest[t] == doctest::Approx((1 - confidence[t]) / 2));

  double auc = -1;
  const auto curve = (dir / "curve.csv").string();
  CHECK(tivm_eval_files(scores.c_str(), (dir / "labels.csv").string().c_str(), 2.0, curve.c_str(), &auc) == TIVM_OK);
  CHECK(auc >= 0.0);
  CHECK(auc <= 1.0);
  CHECK(slurp(curve).find("auc,") != std::string::npos);

  std::vector<double> preds(12);
  std::vector<double> s(12);
  for (int i = 0; i < 12; ++i) preds[i] = labels[i];
  CHECK(tivm_auc_op(preds.data(), labels, 12, 1.0, s.data(), &auc) == TIVM_OK);
  CHECK(auc == 1.0);

  {
    std::ofstream l(dir / "short.csv");
    l << "frame_index,interesting\n0,1\n";
  }
  CHECK(tivm_eval_files(scores.c_str(), (dir / "short.csv").string().c_str(), 2.0, nullptr, &auc) ==
        TIVM_E_LABEL_MISMATCH);

  tivm_bank* wrong = nullptr;
  REQUIRE(tivm_bank_create(2, 3, 8, 8, 1, 5, 5, &wrong) == TIVM_OK);
  CHECK(tivm_online_run(wrong, loaded, &params, nullptr, nullptr, nullptr) == TIVM_E_SHAPE_MISMATCH);

  std::size_t epochs = 0;
  int converged = -1;
  std::vector<double> per_epoch(3);
  const auto report = (dir / "report.csv").string();
  CHECK(tivm_short_term_train(bank, loaded, 3, 0.99, &epochs, &converged, per_epoch.data(), report.c_str()) ==
        TIVM_OK);
  CHECK(epochs >= 1);
  CHECK(slurp(report).rfind("epoch,mean_confidence\n", 0) == 0);

  tivm_bank_free(bank);
  tivm_bank_free(wrong);
  tivm_sequence_free(seq);
  tivm_sequence_free(loaded);
}

TEST_CASE("experiments through the C API") {
  tivm_experiment_config cfg{};
  CHECK(tivm_experiment_config_default("nonsense", &cfg) == TIVM_E_INVALID_ARGUMENT);
  REQUIRE(tivm_experiment_config_default("decay", &cfg) == TIVM_OK);
  CHECK(cfg.rate_sweep_count == 2);
  CHECK(cfg.rate_sweep[0] == 1.0);
  tivm::test::TempDir dir("capi_exp");
  const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  CHECK(tivm_run_experiment("decay", &cfg, a.c_str()) == TIVM_OK);
  CHECK(tivm_run_experiment("decay", &cfg, b.c_str()) == TIVM_OK);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("frame,write_rate,interest\n", 0) == 0);
  cfg.capacity = 0;
  CHECK(tivm_run_experiment("decay", &cfg, a.c_str()) == TIVM_E_INVALID_CAPACITY);
}
