#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "support.hpp"
#include "tivm/binary_io.hpp"
#include "tivm/error.hpp"
#include "tivm/features.hpp"

using namespace tivm;
using tivm::test::gaussian_cube;

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

GrayImage image(std::size_t h, std::size_t w, std::vector<std::uint8_t> pixels) {
  return GrayImage{h, w, std::move(pixels)};
}

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("cube files round-trip bit-exactly") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto cube = gaussian_cube({dim(rng), dim(rng), dim(rng)}, rng, 10.0);
    const auto bytes = encode_cube(cube);
    CHECK(bytes.size() == 20 + 4 * cube.size());
    const auto back = decode_cube(bytes);
    CHECK(back == cube);
    CHECK(std::memcmp(back.values().data(), cube.values().data(), 4 * cube.size()) == 0);
  }
  test::TempDir dir("fcb");
  const auto cube = gaussian_cube({3, 4, 5}, rng);
  save_cube(cube, dir / "a.fcb");
  CHECK(load_cube(dir / "a.fcb") == cube);
  CHECK_FALSE(std::filesystem::exists(dir / "a.fcb.tmp"));
}

TEST_CASE("corrupt cube files are rejected") {
  const auto good = encode_cube(FeatureCube({1, 2, 2}, {1, 2, 3, 4}));
  auto truncated = good;
  truncated.pop_back();
  CHECK(code_of([&] { decode_cube(truncated); }) == ErrorCode::Format);
  auto zero = good;
  zero[12] = 0;
  CHECK(code_of([&] { decode_cube(zero); }) == ErrorCode::Format);
  auto magic = good;
  magic[1] = 'Z';
  CHECK(code_of([&] { decode_cube(magic); }) == ErrorCode::Format);
  auto version = good;
  version[4] = 9;
  CHECK(code_of([&] { decode_cube(version); }) == ErrorCode::Format);
  auto nan = good;
  const float q = NAN;
  std::memcpy(nan.data() + 20, &q, 4);
  CHECK(code_of([&] { decode_cube(nan); }) == ErrorCode::NonFiniteData);
  CHECK(code_of([&] { decode_cube(std::vector<std::uint8_t>(3, 0)); }) == ErrorCode::Format);
  CHECK(code_of([] { load_cube("/nonexistent/x.fcb"); }) == ErrorCode::Io);
}

TEST_CASE("gridpool on a hand-computed image") {
  const auto img = image(4, 4, {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120, 130, 140, 150});
  const auto cube = extract_gridpool(img, 2, 2);
  REQUIRE(cube.shape() == Shape{3, 2, 2});
  const float expected[12] = {25, 45, 105, 125, 10, 5, 10, 5, 40, 40, 20, 20};
  for (std::size_t k = 0; k < 12; ++k) CHECK(cube.values()[k] == doctest::Approx(expected[k] / 255.0));
}

TEST_CASE("gridpool gives remainder pixels to trailing cells") {
  const auto cube = extract_gridpool(image(1, 5, {0, 0, 3, 3, 3}), 1, 2);
  CHECK(cube.at(0, 0, 0) == 0.0f);
  CHECK(cube.at(0, 0, 1) == doctest::Approx(3.0 / 255.0));
  const auto tall = extract_gridpool(image(3, 1, {6, 0, 0}), 2, 1);
  CHECK(tall.at(0, 0, 0) == doctest::Approx(6.0 / 255.0));
  CHECK(tall.at(0, 1, 0) == 0.0f);
}

TEST_CASE("gridpool of constant and mirrored images") {
  const auto flat = extract_gridpool(image(6, 9, std::vector<std::uint8_t>(54, 51)), 3, 4);
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t q = 0; q < 4; ++q) {
      CHECK(flat.at(0, p, q) == doctest::Approx(0.2));
      CHECK(flat.at(1, p, q) == 0.0f);
      CHECK(flat.at(2, p, q) == 0.0f);
    }

  std::mt19937_64 rng(2);
  std::vector<std::uint8_t> px(8 * 8);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 4; ++c) px[r * 8 + c] = px[r * 8 + 7 - c] = static_cast<std::uint8_t>(rng() % 256);
  const auto mirrored = extract_gridpool(image(8, 8, px), 4, 4);
  for (std::size_t p = 0; p < 4; ++p)
    for (std::size_t q = 0; q < 4; ++q) CHECK(mirrored.at(0, p, q) == mirrored.at(0, p, 3 - q));
  CHECK(extract_gridpool(image(8, 8, px), 4, 4) == mirrored);
}

TEST_CASE("gridpool errors") {
  CHECK(code_of([] { extract_gridpool(image(2, 2, {1, 2, 3, 4}), 3, 1); }) == ErrorCode::ImageTooSmall);
  CHECK(code_of([] { extract_gridpool(image(2, 2, {1, 2, 3, 4}), 0, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("PGM decoding") {
  auto bytes = bytes_of("P5\n# a comment\n3 2\n255\n");
  for (std::uint8_t v : {1, 2, 3, 4, 5, 6}) bytes.push_back(v);
  const auto img = decode_pgm(bytes);
  CHECK(img.width == 3);
  CHECK(img.height == 2);
  CHECK(img.at(1, 0) == 4);
  CHECK(decode_pgm(encode_pgm(img)).pixels == img.pixels);

  CHECK(code_of([] { decode_pgm(bytes_of("P2\n1 1\n255\n1")); }) == ErrorCode::Format);
  CHECK(code_of([] { decode_pgm(bytes_of("P5\n1 1\n65535\n\x01\x01")); }) == ErrorCode::Format);
  CHECK(code_of([] { decode_pgm(bytes_of("P5\n2 2\n255\n\x01")); }) == ErrorCode::Format);
  CHECK(code_of([] { decode_pgm(bytes_of("P5\n2")); }) == ErrorCode::Format);
  CHECK(code_of([] { decode_pgm(bytes_of("P5\n1 1\n15\n\x20")); }) == ErrorCode::Format);
}

TEST_CASE("randproj cubes") {
  ExtractorSpec spec{ExtractorKind::RandProj, 8, 8, 4, 99};
  CHECK(extract_randproj(5, spec) == extract_randproj(5, spec));
  double worst = 0.0;
  for (std::uint64_t id = 0; id < 1000; ++id) {
    const auto a = extract_randproj(2 * id, spec);
    const auto b = extract_randproj(2 * id + 1, spec);
    CHECK(std::abs(frobenius_norm(a) - 1.0) < 1e-6);
    CHECK(a.shape() == Shape{4, 8, 8});
    worst = std::max(worst, std::abs(cosine_similarity(a, b)));
  }
  CHECK(worst < 0.2);
  ExtractorSpec other = spec;
  other.seed = 100;
  CHECK_FALSE(extract_randproj(5, spec) == extract_randproj(5, other));
  CHECK(code_of([&] {
          ExtractorSpec bad = spec;
          bad.channels = 0;
          extract_randproj(0, bad);
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("labels CSV parsing") {
  CHECK(parse_labels_csv("frame_index,interesting\n1,1\n0,0\n", 2) == std::vector<std::uint8_t>{0, 1});
  CHECK(code_of([] { parse_labels_csv("frame_index,interesting\n0,1\n", 2); }) == ErrorCode::LabelMismatch);
  CHECK(code_of([] { parse_labels_csv("frame_index,interesting\n0,1\n0,0\n", 2); }) == ErrorCode::LabelMismatch);
  CHECK(code_of([] { parse_labels_csv("frame_index,interesting\n0,1\n5,0\n", 2); }) == ErrorCode::LabelMismatch);
  CHECK(code_of([] { parse_labels_csv("frame_index,interesting\n0,2\n", 1); }) == ErrorCode::Format);
  CHECK(code_of([] { parse_labels_csv("frame_index,interesting\n0\n", 1); }) == ErrorCode::Format);
  CHECK(code_of([] { parse_labels_csv("", 1); }) == ErrorCode::Format);
}

TEST_CASE("loading sequences from a directory") {
  std::mt19937_64 rng(3);
  test::TempDir dir("seq");
  std::vector<FeatureCube> cubes;
  for (const char* name : {"b.fcb", "a.fcb", "c.fcb"}) {
    cubes.push_back(gaussian_cube({2, 3, 3}, rng));
    save_cube(cubes.back(), dir / name);
  }
  atomic_write_file(dir / "notes.txt", std::string_view("ignored"));
  atomic_write_file(dir / "labels3.csv", std::string_view("frame_index,interesting\n0,0\n1,1\n2,0\n"));
  atomic_write_file(dir / "labels2.csv", std::string_view("frame_index,interesting\n0,0\n1,1\n"));

  const auto data = load_sequence(dir.path(), dir / "labels3.csv", ExtractorSpec{});
  REQUIRE(data.frames.size() == 3);
  CHECK(data.frames[0] == cubes[1]);  // a.fcb
  CHECK(data.frames[1] == cubes[0]);
  CHECK(data.labels == std::vector<std::uint8_t>{0, 1, 0});
  CHECK(data.sources[2].filename() == "c.fcb");
  CHECK_FALSE(load_sequence(dir.path(), std::nullopt, ExtractorSpec{}).has_labels());

  CHECK(code_of([&] { load_sequence(dir.path(), dir / "labels2.csv", ExtractorSpec{}); }) ==
        ErrorCode::LabelMismatch);
  CHECK(code_of([&] { load_sequence(dir.path(), dir / "missing.csv", ExtractorSpec{}); }) == ErrorCode::Io);

  save_cube(gaussian_cube({2, 3, 4}, rng), dir / "d.fcb");
  CHECK(code_of([&] { load_sequence(dir.path(), std::nullopt, ExtractorSpec{}); }) ==
        ErrorCode::ShapeInconsistent);

  atomic_write_file(dir / "d.fcb", std::string_view("garbage!"));
  CHECK(code_of([&] { load_sequence(dir.path(), std::nullopt, ExtractorSpec{}); }) == ErrorCode::Format);
}

TEST_CASE("loading sequence errors") {
  test::TempDir dir("empty");
  CHECK(code_of([&] { load_sequence(dir.path(), std::nullopt, ExtractorSpec{}); }) == ErrorCode::Io);
  CHECK(code_of([&] { load_sequence(dir / "nope", std::nullopt, ExtractorSpec{}); }) == ErrorCode::Io);
  CHECK(code_of([&] { load_sequence(dir.path(), std::nullopt, ExtractorSpec{ExtractorKind::RandProj}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("gridpool sequences from PGM files") {
  test::TempDir dir("pgm");
  for (int i = 0; i < 3; ++i) {
    GrayImage img{6, 6, std::vector<std::uint8_t>(36)};
    for (std::size_t k = 0; k < 36; ++k) img.pixels[k] = static_cast<std::uint8_t>((k * (i + 3)) % 256);
    atomic_write_file(dir / ("f" + std::to_string(i) + ".pgm"), encode_pgm(img));
  }
  ExtractorSpec spec{ExtractorKind::GridPool, 3, 2, 3, 0};
  const auto data = load_sequence(dir.path(), std::nullopt, spec);
  REQUIRE(data.frames.size() == 3);
  CHECK(data.frames[0].shape() == Shape{3, 3, 2});
  CHECK(data.frames[1] == extract_gridpool(load_pgm(dir / "f1.pgm"), 3, 2));
  spec.grid_height = 7;
  CHECK(code_of([&] { load_sequence(dir.path(), std::nullopt, spec); }) == ErrorCode::ImageTooSmall);
}

TEST_CASE("synthesized sequences") {
  const ExtractorSpec spec{ExtractorKind::RandProj, 4, 4, 2, 5};
  const auto data = synthesize_sequence(spec, 7);
  REQUIRE(data.frames.size() == 7);
  CHECK(data.frames[3] == extract_randproj(3, spec));
  CHECK(code_of([&] { synthesize_sequence(spec, 0); }) == ErrorCode::EmptySequence);
}
