#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tivm {

// Online precision s(n) for every window length n = 1..N and its mean.
struct OnlinePrecisionCurve {
  std::size_t length = 0;
  double delta = 1.0;
  std::vector<double> s_values;  // s_values[n - 1] = s(n)
  double auc = 0.0;
};

// Frame indices are 0-based throughout. The window for (t, n) is
// [max(0, t - n + 1), t]; it only ever looks backwards.

// Number of interesting labels in the window ending at t.
std::size_t window_interest_count(std::span<const std::uint8_t> labels, std::size_t t, std::size_t n);

// Whether frame t counts as a predicted positive for window length n.
//
// With K interesting frames in the window and G window predictions strictly
// greater than preds[t], frame t is declared when K > 0 and G < ceil(d * K),
// where d = delta for ground-truth-interesting frames and d = 1 otherwise:
// delta widens the rank slots a true positive may occupy without letting
// uninteresting frames claim the extra slots.
bool declare_positive(std::span<const double> preds, std::span<const std::uint8_t> labels, std::size_t t,
                      std::size_t n, double delta);

// TP / (TP + FP) over all t for window length n; 1 when nothing is declared.
double online_precision(std::span<const double> preds, std::span<const std::uint8_t> labels, std::size_t n,
                        double delta);

// s(n) for all n via one backwards sweep per frame, O(N^2).
OnlinePrecisionCurve auc_op(std::span<const double> preds, std::span<const std::uint8_t> labels, double delta);

// Reference implementation: literal loops over (n, t, window), O(N^3). Shares
// no code with auc_op.
OnlinePrecisionCurve metric_oracle(std::span<const double> preds, std::span<const std::uint8_t> labels,
                                   double delta);

// "n,n_over_N,s" rows followed by "auc,<value>".
std::string format_curve_csv(const OnlinePrecisionCurve& curve);

}  // namespace tivm
