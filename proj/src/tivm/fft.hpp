#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "tivm/tensor.hpp"

namespace tivm {

// Frequency-domain cross-correlation against a fixed query cube.
//
// The query spectrum is computed once; each match() transforms one
// candidate cube channel by channel, accumulates conj(X_ch) * M_ch over
// channels, and runs a single inverse transform. The inverse yields
// corr[s] = sum_p x[p] * m[p + s] (indices mod h, w), i.e. the inner product
// of x with circular_translate(m, s), so the spatial argmax is directly the
// shift to apply to m.
//
// match() is const and allocates its own scratch, so one QuerySpectrum can
// serve concurrent callers.
class QuerySpectrum {
 public:
  // Throws DegenerateNorm if the query norm is below kNormEpsilon.
  explicit QuerySpectrum(const FeatureCube& query);

  const Shape& shape() const noexcept { return shape_; }
  double norm() const noexcept { return norm_; }

  // Throws ShapeMismatch / DegenerateNorm.
  ShiftMatch match(const FeatureCube& candidate) const;

 private:
  Shape shape_;
  std::size_t half_width_;
  double norm_;
  std::vector<std::complex<double>> spectrum_;  // channels x h x (w/2+1)
};

}  // namespace tivm
