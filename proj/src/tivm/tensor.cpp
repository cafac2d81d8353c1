#include "tivm/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "tivm/error.hpp"
#include "tivm/fft.hpp"

namespace tivm {

std::string to_string(const Shape& shape) {
  return std::to_string(shape.channels) + "x" + std::to_string(shape.height) + "x" +
         std::to_string(shape.width);
}

ShiftIndex wrap_shift(long long dy, long long dx, const Shape& shape) {
  const auto h = static_cast<long long>(shape.height);
  const auto w = static_cast<long long>(shape.width);
  return ShiftIndex{static_cast<std::size_t>(((dy % h) + h) % h),
                    static_cast<std::size_t>(((dx % w) + w) % w)};
}

FeatureCube::FeatureCube(Shape shape, std::vector<float> values)
    : shape_(shape), values_(std::move(values)) {
  if (shape_.channels == 0 || shape_.height == 0 || shape_.width == 0)
    fail(ErrorCode::InvalidArgument, "cube dimensions must be >= 1, got " + to_string(shape_));
  if (values_.size() != shape_.size())
    fail(ErrorCode::InvalidArgument, "cube " + to_string(shape_) + " needs " +
                                         std::to_string(shape_.size()) + " values, got " +
                                         std::to_string(values_.size()));
  for (float v : values_)
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteData, "cube contains a non-finite value");
}

FeatureCube FeatureCube::zeros(Shape shape) {
  return FeatureCube(shape, std::vector<float>(shape.size(), 0.0f));
}

void require_same_shape(const FeatureCube& a, const FeatureCube& b) {
  if (a.shape() != b.shape())
    fail(ErrorCode::ShapeMismatch,
         "shape mismatch: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
}

double dot(std::span<const float> a, std::span<const float> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return sum;
}

double frobenius_norm(std::span<const float> values) { return std::sqrt(dot(values, values)); }

double frobenius_norm(const FeatureCube& a) { return frobenius_norm(a.values()); }

double cosine_similarity(const FeatureCube& a, const FeatureCube& b) {
  require_same_shape(a, b);
  const double na = frobenius_norm(a);
  const double nb = frobenius_norm(b);
  if (na < kNormEpsilon || nb < kNormEpsilon)
    fail(ErrorCode::DegenerateNorm, "cosine similarity of a zero-norm cube");
  return std::clamp(dot(a.values(), b.values()) / (na * nb), -1.0, 1.0);
}

FeatureCube circular_translate(const FeatureCube& a, ShiftIndex shift) {
  const Shape& s = a.shape();
  const std::size_t dy = shift.dy % s.height;
  const std::size_t dx = shift.dx % s.width;
  std::vector<float> out(s.size());
  for (std::size_t ch = 0; ch < s.channels; ++ch) {
    const auto src = a.channel(ch);
    float* dst = out.data() + ch * s.plane();
    for (std::size_t p = 0; p < s.height; ++p) {
      const std::size_t row = ((p + dy) % s.height) * s.width;
      for (std::size_t q = 0; q < s.width; ++q) dst[p * s.width + q] = src[row + (q + dx) % s.width];
    }
  }
  return FeatureCube(s, std::move(out));
}

ShiftMatch xcorr_similarity(const FeatureCube& x, const FeatureCube& m) {
  require_same_shape(x, m);
  return QuerySpectrum(x).match(m);
}

ShiftMatch xcorr_oracle(const FeatureCube& x, const FeatureCube& m) {
  require_same_shape(x, m);
  ShiftMatch best{-2.0, {}};
  for (std::size_t dy = 0; dy < x.shape().height; ++dy)
    for (std::size_t dx = 0; dx < x.shape().width; ++dx) {
      const double score = cosine_similarity(x, circular_translate(m, {dy, dx}));
      if (score > best.score) best = {score, {dy, dx}};
    }
  return best;
}

double channel_confidence(const FeatureCube& a, const FeatureCube& b) {
  require_same_shape(a, b);
  double total = 0.0;
  for (std::size_t ch = 0; ch < a.shape().channels; ++ch) {
    const auto sa = a.channel(ch);
    const auto sb = b.channel(ch);
    const double na = frobenius_norm(sa);
    const double nb = frobenius_norm(sb);
    if (na < kNormEpsilon || nb < kNormEpsilon) continue;
    total += std::clamp(dot(sa, sb) / (na * nb), -1.0, 1.0);
  }
  return total / static_cast<double>(a.shape().channels);
}

}  // namespace tivm
