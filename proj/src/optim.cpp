#include "varconstrain/optim.hpp"

#include <cmath>
#include <string>

#include "varconstrain/errors.hpp"

namespace varconstrain {

AdamState AdamState::zeros(std::size_t n, double beta1, double beta2, double eps) {
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(eps > 0.0)) {
    throw UsageError("adam: need 0 <= beta1, beta2 < 1 and eps > 0");
  }
  AdamState s;
  s.m.assign(n, 0.0);
  s.v.assign(n, 0.0);
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  return s;
}

void adam_step(AdamState& s, std::span<double> params, std::span<const double> grads,
               double lr) {
  const std::size_t n = params.size();
  if (grads.size() != n || s.m.size() != n || s.v.size() != n) {
    throw UsageError("adam_step: parameter, gradient and state sizes differ");
  }
  if (!(lr > 0.0)) throw UsageError("adam_step: learning rate must be > 0");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericError("adam_step: non-finite gradient at parameter " + std::to_string(i));
    }
  }
  s.t += 1;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * g;
    s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * g * g;
    params[i] -= lr * (s.m[i] / c1) / (std::sqrt(s.v[i] / c2) + s.eps);
  }
}

}  // namespace varconstrain
