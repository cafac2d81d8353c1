#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tivm {

inline constexpr double kNormEpsilon = 1e-12;

struct Shape {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t plane() const noexcept { return height * width; }
  std::size_t size() const noexcept { return channels * height * width; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& shape);

// Circular translation offset; dy in [0, height), dx in [0, width).
struct ShiftIndex {
  std::size_t dy = 0;
  std::size_t dx = 0;

  bool operator==(const ShiftIndex&) const = default;
};

// Reduces an arbitrary (possibly negative) offset into the half-open ranges
// of `shape`.
ShiftIndex wrap_shift(long long dy, long long dx, const Shape& shape);

// A c x h x w block of finite feature activations, channel-major then
// row-major: element (ch, p, q) lives at ch*h*w + p*w + q.
class FeatureCube {
 public:
  // Throws InvalidArgument for zero dims or a length mismatch and
  // NonFiniteData for NaN/Inf entries.
  FeatureCube(Shape shape, std::vector<float> values);

  static FeatureCube zeros(Shape shape);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const float> values() const noexcept { return values_; }
  std::span<const float> channel(std::size_t ch) const noexcept {
    return std::span<const float>(values_).subspan(ch * shape_.plane(), shape_.plane());
  }

  float at(std::size_t ch, std::size_t p, std::size_t q) const noexcept {
    return values_[(ch * shape_.height + p) * shape_.width + q];
  }

  // Mutable access for in-place kernels. Callers keep entries finite.
  std::span<float> mutable_values() noexcept { return values_; }

  bool operator==(const FeatureCube&) const = default;

 private:
  Shape shape_;
  std::vector<float> values_;
};

void require_same_shape(const FeatureCube& a, const FeatureCube& b);

double frobenius_norm(const FeatureCube& a);
double frobenius_norm(std::span<const float> values);

double dot(std::span<const float> a, std::span<const float> b);

double cosine_similarity(const FeatureCube& a, const FeatureCube& b);

// output[ch, p, q] = input[ch, (p + dy) mod h, (q + dx) mod w]
FeatureCube circular_translate(const FeatureCube& a, ShiftIndex shift);

struct ShiftMatch {
  double score = 0.0;
  ShiftIndex shift;
};

// Maximum cosine similarity between x and every circular translation of m,
// evaluated in the frequency domain. The returned shift satisfies
// cosine_similarity(x, circular_translate(m, shift)) == score.
ShiftMatch xcorr_similarity(const FeatureCube& x, const FeatureCube& m);

// Brute-force reference for xcorr_similarity: all h*w shifts in the spatial
// domain, ties resolved to the lexicographically smallest (dy, dx).
ShiftMatch xcorr_oracle(const FeatureCube& x, const FeatureCube& m);

// Mean over channels of the per-channel 2-D cosine similarity. Channels where
// either slice is (numerically) zero contribute 0.
double channel_confidence(const FeatureCube& a, const FeatureCube& b);

}  // namespace tivm
