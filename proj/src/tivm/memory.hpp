#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tivm/tensor.hpp"

namespace tivm {

// Similarities are clamped to +-(1 - kTangentEpsilon) before the tangent so
// a perfect match saturates the softmax instead of producing infinity.
inline constexpr double kTangentEpsilon = 1e-6;

enum class ReadMode { WTI, WOTI };
enum class WriteProtocol { Tangent, Baseline };

const char* to_string(ReadMode mode) noexcept;
const char* to_string(WriteProtocol protocol) noexcept;

// Non-negative weights over the bank's cubes, summing to one.
class WeightVector {
 public:
  // Throws InvalidArgument for negative/non-finite entries or a sum off by
  // more than 1e-6.
  explicit WeightVector(std::vector<double> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }
  std::span<const double> values() const noexcept { return weights_; }

 private:
  std::vector<double> weights_;
};

// Numerically stable softmax (max subtraction).
std::vector<double> softmax(std::span<const double> logits);

// rate * tan(pi/2 * clamp(similarity, -1 + eps, 1 - eps))
double tangent_logit(double similarity, double rate);

struct ReadResult {
  FeatureCube recall;
  WeightVector weights;
  std::vector<ShiftIndex> shifts;
  std::vector<double> cube_scores;
  double confidence = 0.0;
};

struct BankHeader {
  std::size_t capacity = 0;
  Shape shape;
  std::uint64_t seed = 0;
  double write_rate = 0.0;
  double read_rate = 0.0;
};

// n memory cubes of one shape plus the write/read rates. Reads are const and
// may run concurrently; writes need exclusive access.
class MemoryBank {
 public:
  // Seeded initialisation: every entry uniform in [-0.1, 0.1], each cube
  // drawn from its own stream. Throws InvalidCapacity / InvalidRate /
  // InvalidArgument (zero dims).
  static MemoryBank create(std::size_t capacity, Shape shape, std::uint64_t seed, double write_rate,
                           double read_rate);

  // Adopts explicit cubes (tests, snapshots). All cubes must share a shape
  // and have non-zero norm.
  static MemoryBank from_cubes(std::vector<FeatureCube> cubes, std::uint64_t seed, double write_rate,
                               double read_rate);

  std::size_t capacity() const noexcept { return cubes_.size(); }
  const Shape& shape() const noexcept { return cubes_.front().shape(); }
  std::uint64_t seed() const noexcept { return seed_; }
  double write_rate() const noexcept { return write_rate_; }
  double read_rate() const noexcept { return read_rate_; }
  BankHeader header() const;

  void set_rates(double write_rate, double read_rate);

  std::span<const FeatureCube> cubes() const noexcept { return cubes_; }
  const FeatureCube& cube(std::size_t i) const { return cubes_.at(i); }

  // M_i <- (1 - w_i) * M_i + w_i * x for every cube.
  void write(const FeatureCube& x, const WeightVector& weights);

  ReadResult read(const FeatureCube& x, ReadMode mode, double read_rate) const;
  ReadResult read(const FeatureCube& x, ReadMode mode = ReadMode::WTI) const {
    return read(x, mode, read_rate_);
  }

  bool operator==(const MemoryBank&) const = default;

 private:
  MemoryBank(std::vector<FeatureCube> cubes, std::uint64_t seed, double write_rate, double read_rate);

  std::vector<FeatureCube> cubes_;
  std::uint64_t seed_;
  double write_rate_;
  double read_rate_;
};

// m <- (1 - w) * m + w * x, evaluated in double and rounded once.
void blend_into(FeatureCube& m, const FeatureCube& x, double w);

// Plain cosine similarity of x against every cube, in bank order.
std::vector<double> cube_similarities(const FeatureCube& x, const MemoryBank& bank);

// Sparse writing weights: softmax(rate * tan(pi/2 * D)).
WeightVector write_weights(const FeatureCube& x, const MemoryBank& bank, double write_rate);
inline WeightVector write_weights(const FeatureCube& x, const MemoryBank& bank) {
  return write_weights(x, bank, bank.write_rate());
}

// Dense comparator without the tangent map: softmax(rate * D).
WeightVector write_weights_baseline(const FeatureCube& x, const MemoryBank& bank, double rate);

// Weights for x under `protocol`, then the write itself.
void write_with(MemoryBank& bank, const FeatureCube& x, WriteProtocol protocol, double rate);

// Full-cube cosine similarity between what was read and what was written.
double reading_accuracy(const FeatureCube& recall, const FeatureCube& target);

// TIVM snapshot: "TIVM", u32 version, u32 n c h w, u64 seed, f64 write rate,
// f64 read rate, then n*c*h*w f32, all little-endian.
std::vector<std::uint8_t> encode_bank(const MemoryBank& bank);
MemoryBank decode_bank(std::span<const std::uint8_t> bytes);
void save_bank(const MemoryBank& bank, const std::filesystem::path& path);
MemoryBank load_bank(const std::filesystem::path& path);

}  // namespace tivm
