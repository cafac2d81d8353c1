#include "tivm/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

#include "tivm/error.hpp"

namespace tivm {
namespace {

static_assert(sizeof(std::complex<double>) == sizeof(fftw_complex));

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// The FFTW planner is not re-entrant; plan execution is. Plans are created
// once per (h, w) under the lock and reused through the new-array interface.
// FFTW_ESTIMATE keeps the chosen algorithm, and therefore the bits of every
// result, identical from run to run.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [dims, plans] : plans_) {
      fftw_destroy_plan(plans.forward);
      fftw_destroy_plan(plans.inverse);
    }
  }

  PlanPair get(std::size_t height, std::size_t width) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(height, width);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const int h = static_cast<int>(height);
    const int w = static_cast<int>(width);
    const std::size_t half = width / 2 + 1;
    std::vector<double> real(height * width);
    std::vector<std::complex<double>> spec(height * half);
    auto* spec_ptr = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair plans;
    plans.forward = fftw_plan_dft_r2c_2d(h, w, real.data(), spec_ptr, flags);
    plans.inverse = fftw_plan_dft_c2r_2d(h, w, spec_ptr, real.data(), flags);
    if (plans.forward == nullptr || plans.inverse == nullptr)
      fail(ErrorCode::InvalidArgument, "FFTW could not plan a " + std::to_string(height) + "x" +
                                           std::to_string(width) + " transform");
    plans_.emplace(key, plans);
    return plans;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, std::size_t>, PlanPair> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void forward_channel(const PlanPair& plans, std::span<const float> plane, std::vector<double>& real,
                     std::complex<double>* out) {
  std::copy(plane.begin(), plane.end(), real.begin());
  fftw_execute_dft_r2c(plans.forward, real.data(), reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

QuerySpectrum::QuerySpectrum(const FeatureCube& query)
    : shape_(query.shape()), half_width_(query.shape().width / 2 + 1), norm_(frobenius_norm(query)) {
  if (norm_ < kNormEpsilon) fail(ErrorCode::DegenerateNorm, "query cube has zero Frobenius norm");
  const PlanPair plans = plan_cache().get(shape_.height, shape_.width);
  const std::size_t bins = shape_.height * half_width_;
  spectrum_.resize(shape_.channels * bins);
  std::vector<double> real(shape_.plane());
  for (std::size_t ch = 0; ch < shape_.channels; ++ch)
    forward_channel(plans, query.channel(ch), real, spectrum_.data() + ch * bins);
  for (auto& v : spectrum_) v = std::conj(v);
}

ShiftMatch QuerySpectrum::match(const FeatureCube& candidate) const {
  if (candidate.shape() != shape_)
    fail(ErrorCode::ShapeMismatch,
         "cross-correlation of " + to_string(shape_) + " against " + to_string(candidate.shape()));
  const double candidate_norm = frobenius_norm(candidate);
  if (candidate_norm < kNormEpsilon)
    fail(ErrorCode::DegenerateNorm, "memory cube has zero Frobenius norm");

  const PlanPair plans = plan_cache().get(shape_.height, shape_.width);
  const std::size_t bins = shape_.height * half_width_;
  std::vector<double> real(shape_.plane());
  std::vector<std::complex<double>> channel_spec(bins);
  std::vector<std::complex<double>> cross(bins, {0.0, 0.0});
  for (std::size_t ch = 0; ch < shape_.channels; ++ch) {
    forward_channel(plans, candidate.channel(ch), real, channel_spec.data());
    const std::complex<double>* query = spectrum_.data() + ch * bins;
    for (std::size_t k = 0; k < bins; ++k) cross[k] += query[k] * channel_spec[k];
  }
  fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(cross.data()), real.data());

  // Row-major scan with strict comparison: ties go to the smallest (dy, dx).
  std::size_t best = 0;
  for (std::size_t k = 1; k < real.size(); ++k)
    if (real[k] > real[best]) best = k;

  const double scale = static_cast<double>(shape_.plane()) * norm_ * candidate_norm;
  ShiftMatch result;
  result.score = std::clamp(real[best] / scale, -1.0, 1.0);
  result.shift = ShiftIndex{best / shape_.width, best % shape_.width};
  return result;
}

}  // namespace tivm
