#include "tivm/metrics.hpp"

#include <cmath>

#include "tivm/csv.hpp"
#include "tivm/error.hpp"

namespace tivm {
namespace {

void require_inputs(std::span<const double> preds, std::span<const std::uint8_t> labels, double delta) {
  if (preds.size() != labels.size())
    fail(ErrorCode::LengthMismatch, std::to_string(preds.size()) + " predictions for " +
                                        std::to_string(labels.size()) + " labels");
  if (preds.empty()) fail(ErrorCode::LengthMismatch, "metric needs at least one frame");
  if (!(delta >= 1.0) || !std::isfinite(delta)) fail(ErrorCode::InvalidArgument, "delta must be >= 1");
  for (double p : preds)
    if (!std::isfinite(p)) fail(ErrorCode::InvalidArgument, "predictions must be finite");
  for (auto l : labels)
    if (l > 1) fail(ErrorCode::InvalidArgument, "labels must be 0 or 1");
}

void require_window(std::size_t size, std::size_t t, std::size_t n) {
  if (t >= size || n == 0)
    fail(ErrorCode::IndexOutOfRange, "window (t=" + std::to_string(t) + ", n=" + std::to_string(n) +
                                         ") is outside a sequence of " + std::to_string(size));
}

// Rank slots available to frame t given K interesting frames in its window.
std::size_t slots(std::size_t interesting, bool is_interesting, double delta) {
  const double d = is_interesting ? delta : 1.0;
  return static_cast<std::size_t>(std::ceil(d * static_cast<double>(interesting)));
}

double precision(std::size_t tp, std::size_t fp) {
  return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

std::size_t window_interest_count(std::span<const std::uint8_t> labels, std::size_t t, std::size_t n) {
  require_window(labels.size(), t, n);
  const std::size_t first = t + 1 > n ? t + 1 - n : 0;
  std::size_t count = 0;
  for (std::size_t j = first; j <= t; ++j) count += labels[j];
  return count;
}

bool declare_positive(std::span<const double> preds, std::span<const std::uint8_t> labels, std::size_t t,
                      std::size_t n, double delta) {
  require_inputs(preds, labels, delta);
  require_window(labels.size(), t, n);
  const std::size_t interesting = window_interest_count(labels, t, n);
  if (interesting == 0) return false;
  const std::size_t first = t + 1 > n ? t + 1 - n : 0;
  std::size_t greater = 0;
  for (std::size_t j = first; j <= t; ++j) greater += preds[j] > preds[t];
  return greater < slots(interesting, labels[t] == 1, delta);
}

double online_precision(std::span<const double> preds, std::span<const std::uint8_t> labels, std::size_t n,
                        double delta) {
  require_inputs(preds, labels, delta);
  if (n == 0 || n > labels.size())
    fail(ErrorCode::IndexOutOfRange, "window length " + std::to_string(n) + " outside [1, " +
                                         std::to_string(labels.size()) + "]");
  std::size_t tp = 0, fp = 0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (!declare_positive(preds, labels, t, n, delta)) continue;
    if (labels[t]) ++tp;
    else ++fp;
  }
  return precision(tp, fp);
}

OnlinePrecisionCurve auc_op(std::span<const double> preds, std::span<const std::uint8_t> labels, double delta) {
  require_inputs(preds, labels, delta);
  const std::size_t size = labels.size();
  // tp[n], fp[n] for n in 1..size; the clipped windows n > t+1 all equal the
  // full prefix, handled by a suffix count.
  std::vector<std::size_t> tp(size + 2, 0), fp(size + 2, 0);
  std::vector<std::size_t> tp_tail(size + 2, 0), fp_tail(size + 2, 0);
  for (std::size_t t = 0; t < size; ++t) {
    const bool positive = labels[t] == 1;
    std::size_t interesting = 0, greater = 0;
    bool declared = false;
    for (std::size_t n = 1; n <= t + 1; ++n) {
      const std::size_t j = t + 1 - n;
      interesting += labels[j];
      greater += preds[j] > preds[t];
      declared = interesting > 0 && greater < slots(interesting, positive, delta);
      if (declared) (positive ? tp : fp)[n] += 1;
    }
    if (declared) (positive ? tp_tail : fp_tail)[t + 2] += 1;
  }
  OnlinePrecisionCurve curve;
  curve.length = size;
  curve.delta = delta;
  curve.s_values.resize(size);
  std::size_t tail_tp = 0, tail_fp = 0;
  for (std::size_t n = 1; n <= size; ++n) {
    tail_tp += tp_tail[n];
    tail_fp += fp_tail[n];
    curve.s_values[n - 1] = precision(tp[n] + tail_tp, fp[n] + tail_fp);
  }
  curve.auc = mean(curve.s_values);
  return curve;
}

OnlinePrecisionCurve metric_oracle(std::span<const double> preds, std::span<const std::uint8_t> labels,
                                   double delta) {
  require_inputs(preds, labels, delta);
  const std::size_t size = labels.size();
  OnlinePrecisionCurve curve;
  curve.length = size;
  curve.delta = delta;
  for (std::size_t n = 1; n <= size; ++n) {
    std::size_t true_pos = 0, false_pos = 0;
    for (std::size_t t = 0; t < size; ++t) {
      const std::size_t start = t + 1 >= n ? t + 1 - n : 0;
      std::size_t k = 0;
      for (std::size_t j = start; j <= t; ++j)
        if (labels[j] == 1) ++k;
      if (k == 0) continue;
      std::size_t outranked = 0;
      for (std::size_t j = start; j <= t; ++j)
        if (preds[j] > preds[t]) ++outranked;
      const double allowance = labels[t] == 1 ? std::ceil(delta * static_cast<double>(k)) : static_cast<double>(k);
      if (static_cast<double>(outranked) < allowance) {
        if (labels[t] == 1) ++true_pos;
        else ++false_pos;
      }
    }
    curve.s_values.push_back(true_pos + false_pos == 0
                                 ? 1.0
                                 : static_cast<double>(true_pos) / static_cast<double>(true_pos + false_pos));
  }
  double total = 0.0;
  for (double s : curve.s_values) total += s;
  curve.auc = total / static_cast<double>(size);
  return curve;
}

std::string format_curve_csv(const OnlinePrecisionCurve& curve) {
  std::string out = "n,n_over_N,s\n";
  for (std::size_t n = 1; n <= curve.s_values.size(); ++n)
    out += std::to_string(n) + "," + format_real(static_cast<double>(n) / static_cast<double>(curve.length)) +
           "," + format_real(curve.s_values[n - 1]) + "\n";
  out += "auc," + format_real(curve.auc) + "\n";
  return out;
}

}  // namespace tivm
