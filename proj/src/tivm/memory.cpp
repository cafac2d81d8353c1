#include "tivm/memory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "tivm/binary_io.hpp"
#include "tivm/error.hpp"
#include "tivm/fft.hpp"
#include "tivm/parallel.hpp"
#include "tivm/random.hpp"

namespace tivm {
namespace {

constexpr char kBankMagic[] = "TIVM";
constexpr std::uint32_t kBankVersion = 1;
constexpr double kInitRange = 0.1;

void require_rate(double rate, const char* name) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    fail(ErrorCode::InvalidRate, std::string(name) + " must be a positive finite number");
}

void require_query(const FeatureCube& x, const MemoryBank& bank) {
  if (x.shape() != bank.shape())
    fail(ErrorCode::ShapeMismatch,
         "input " + to_string(x.shape()) + " does not match bank cubes " + to_string(bank.shape()));
  if (frobenius_norm(x) < kNormEpsilon) fail(ErrorCode::DegenerateNorm, "input cube has zero norm");
}

}  // namespace

const char* to_string(ReadMode mode) noexcept { return mode == ReadMode::WTI ? "WTI" : "WOTI"; }

const char* to_string(WriteProtocol protocol) noexcept {
  return protocol == WriteProtocol::Tangent ? "tangent" : "baseline";
}

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) fail(ErrorCode::InvalidArgument, "weight vector is empty");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w))
      fail(ErrorCode::InvalidArgument, "weights must be finite and non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    fail(ErrorCode::InvalidArgument, "weights sum to " + std::to_string(sum) + ", expected 1");
}

std::vector<double> softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double tangent_logit(double similarity, double rate) {
  const double clamped = std::clamp(similarity, -1.0 + kTangentEpsilon, 1.0 - kTangentEpsilon);
  return rate * std::tan(std::numbers::pi / 2.0 * clamped);
}

MemoryBank::MemoryBank(std::vector<FeatureCube> cubes, std::uint64_t seed, double write_rate,
                       double read_rate)
    : cubes_(std::move(cubes)), seed_(seed), write_rate_(write_rate), read_rate_(read_rate) {}

MemoryBank MemoryBank::create(std::size_t capacity, Shape shape, std::uint64_t seed, double write_rate,
                              double read_rate) {
  if (capacity == 0) fail(ErrorCode::InvalidCapacity, "memory capacity must be >= 1");
  if (shape.channels == 0 || shape.height == 0 || shape.width == 0)
    fail(ErrorCode::InvalidArgument, "cube dimensions must be >= 1, got " + to_string(shape));
  require_rate(write_rate, "write rate");
  require_rate(read_rate, "read rate");

  std::vector<FeatureCube> cubes;
  cubes.reserve(capacity);
  for (std::size_t i = 0; i < capacity; ++i) {
    Rng rng(derive_seed(seed, i));
    std::vector<float> values(shape.size());
    do {
      for (float& v : values) v = static_cast<float>(rng.uniform(-kInitRange, kInitRange));
    } while (frobenius_norm(values) < kNormEpsilon);
    cubes.emplace_back(shape, std::move(values));
  }
  return MemoryBank(std::move(cubes), seed, write_rate, read_rate);
}

MemoryBank MemoryBank::from_cubes(std::vector<FeatureCube> cubes, std::uint64_t seed, double write_rate,
                                  double read_rate) {
  if (cubes.empty()) fail(ErrorCode::InvalidCapacity, "memory capacity must be >= 1");
  require_rate(write_rate, "write rate");
  require_rate(read_rate, "read rate");
  for (const auto& cube : cubes) {
    require_same_shape(cubes.front(), cube);
    if (frobenius_norm(cube) < kNormEpsilon)
      fail(ErrorCode::DegenerateNorm, "memory cubes must have non-zero norm");
  }
  return MemoryBank(std::move(cubes), seed, write_rate, read_rate);
}

BankHeader MemoryBank::header() const {
  return BankHeader{capacity(), shape(), seed_, write_rate_, read_rate_};
}

void MemoryBank::set_rates(double write_rate, double read_rate) {
  require_rate(write_rate, "write rate");
  require_rate(read_rate, "read rate");
  write_rate_ = write_rate;
  read_rate_ = read_rate;
}

void MemoryBank::write(const FeatureCube& x, const WeightVector& weights) {
  if (x.shape() != shape())
    fail(ErrorCode::ShapeMismatch,
         "input " + to_string(x.shape()) + " does not match bank cubes " + to_string(shape()));
  if (weights.size() != capacity())
    fail(ErrorCode::ShapeMismatch, "weight vector has " + std::to_string(weights.size()) +
                                       " entries for a bank of " + std::to_string(capacity()));
  parallel_for(capacity(), x.size(), [&](std::size_t i) {
    if (weights[i] != 0.0) blend_into(cubes_[i], x, weights[i]);
  });
}

ReadResult MemoryBank::read(const FeatureCube& x, ReadMode mode, double read_rate) const {
  require_query(x, *this);
  require_rate(read_rate, "read rate");
  const std::size_t n = capacity();
  std::vector<double> scores(n);
  std::vector<ShiftIndex> shifts(n);

  if (mode == ReadMode::WTI) {
    const QuerySpectrum query(x);
    parallel_for(n, x.size(), [&](std::size_t i) {
      const ShiftMatch match = query.match(cubes_[i]);
      scores[i] = match.score;
      shifts[i] = match.shift;
    });
  } else {
    parallel_for(n, x.size(), [&](std::size_t i) { scores[i] = cosine_similarity(x, cubes_[i]); });
  }

  std::vector<double> logits(n);
  for (std::size_t i = 0; i < n; ++i) logits[i] = tangent_logit(scores[i], read_rate);
  std::vector<double> weights = softmax(logits);

  const Shape& s = shape();
  std::vector<double> acc(s.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = weights[i];
    if (r == 0.0) continue;
    const auto& cube = cubes_[i];
    for (std::size_t ch = 0; ch < s.channels; ++ch) {
      const auto src = cube.channel(ch);
      double* dst = acc.data() + ch * s.plane();
      for (std::size_t p = 0; p < s.height; ++p) {
        const std::size_t row = ((p + shifts[i].dy) % s.height) * s.width;
        for (std::size_t q = 0; q < s.width; ++q)
          dst[p * s.width + q] += r * src[row + (q + shifts[i].dx) % s.width];
      }
    }
  }
  std::vector<float> recall_values(acc.begin(), acc.end());
  FeatureCube recall(s, std::move(recall_values));
  const double confidence = channel_confidence(x, recall);
  return ReadResult{std::move(recall), WeightVector(std::move(weights)), std::move(shifts),
                    std::move(scores), confidence};
}

void blend_into(FeatureCube& m, const FeatureCube& x, double w) {
  require_same_shape(m, x);
  const auto input = x.values();
  auto cube = m.mutable_values();
  for (std::size_t k = 0; k < cube.size(); ++k) cube[k] = static_cast<float>((1.0 - w) * cube[k] + w * input[k]);
}

std::vector<double> cube_similarities(const FeatureCube& x, const MemoryBank& bank) {
  require_query(x, bank);
  std::vector<double> sims(bank.capacity());
  parallel_for(bank.capacity(), x.size(),
               [&](std::size_t i) { sims[i] = cosine_similarity(x, bank.cube(i)); });
  return sims;
}

WeightVector write_weights(const FeatureCube& x, const MemoryBank& bank, double write_rate) {
  require_rate(write_rate, "write rate");
  std::vector<double> logits = cube_similarities(x, bank);
  for (double& d : logits) d = tangent_logit(d, write_rate);
  return WeightVector(softmax(logits));
}

WeightVector write_weights_baseline(const FeatureCube& x, const MemoryBank& bank, double rate) {
  require_rate(rate, "baseline rate");
  std::vector<double> logits = cube_similarities(x, bank);
  for (double& d : logits) d *= rate;
  return WeightVector(softmax(logits));
}

void write_with(MemoryBank& bank, const FeatureCube& x, WriteProtocol protocol, double rate) {
  const WeightVector w = protocol == WriteProtocol::Tangent ? write_weights(x, bank, rate)
                                                            : write_weights_baseline(x, bank, rate);
  bank.write(x, w);
}

double reading_accuracy(const FeatureCube& recall, const FeatureCube& target) {
  return cosine_similarity(recall, target);
}

std::vector<std::uint8_t> encode_bank(const MemoryBank& bank) {
  ByteWriter out;
  out.put_bytes(std::string_view(kBankMagic, 4));
  out.put_u32(kBankVersion);
  out.put_u32(static_cast<std::uint32_t>(bank.capacity()));
  out.put_u32(static_cast<std::uint32_t>(bank.shape().channels));
  out.put_u32(static_cast<std::uint32_t>(bank.shape().height));
  out.put_u32(static_cast<std::uint32_t>(bank.shape().width));
  out.put_u64(bank.seed());
  out.put_f64(bank.write_rate());
  out.put_f64(bank.read_rate());
  for (const auto& cube : bank.cubes())
    for (float v : cube.values()) out.put_f32(v);
  return out.bytes();
}

MemoryBank decode_bank(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  if (in.take_bytes(4) != std::string_view(kBankMagic, 4))
    fail(ErrorCode::Format, "not a TIVM bank snapshot (bad magic)");
  if (const auto version = in.take_u32(); version != kBankVersion)
    fail(ErrorCode::Format, "unsupported TIVM version " + std::to_string(version));
  const std::uint64_t n = in.take_u32();
  Shape shape;
  shape.channels = in.take_u32();
  shape.height = in.take_u32();
  shape.width = in.take_u32();
  const std::uint64_t seed = in.take_u64();
  const double write_rate = in.take_f64();
  const double read_rate = in.take_f64();
  if (n == 0 || shape.size() == 0) fail(ErrorCode::Format, "TIVM header has a zero dimension");
  if (!(write_rate > 0.0) || !(read_rate > 0.0) || !std::isfinite(write_rate) || !std::isfinite(read_rate))
    fail(ErrorCode::Format, "TIVM header has a non-positive rate");
  const std::uint64_t per_cube = shape.size();
  if (in.remaining() % 4 != 0 || in.remaining() / 4 / per_cube != n || in.remaining() / 4 % per_cube != 0)
    fail(ErrorCode::Format, "TIVM payload length does not match header (" +
                                std::to_string(in.remaining()) + " bytes)");

  std::vector<FeatureCube> cubes;
  cubes.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::vector<float> values(per_cube);
    for (float& v : values) v = in.take_f32();
    cubes.emplace_back(shape, std::move(values));
    if (frobenius_norm(cubes.back()) < kNormEpsilon)
      fail(ErrorCode::Format, "TIVM snapshot holds a zero-norm cube");
  }
  return MemoryBank::from_cubes(std::move(cubes), seed, write_rate, read_rate);
}

void save_bank(const MemoryBank& bank, const std::filesystem::path& path) {
  atomic_write_file(path, encode_bank(bank));
}

MemoryBank load_bank(const std::filesystem::path& path) { return decode_bank(read_file(path)); }

}  // namespace tivm
