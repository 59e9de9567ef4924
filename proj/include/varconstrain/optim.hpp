#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace varconstrain {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState zeros(std::size_t n, double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8);
};

/// One bias-corrected Adam update of `params` in place.
/// Throws NumericError on a non-finite gradient; nothing is modified in that case.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               double lr);

}  // namespace varconstrain
