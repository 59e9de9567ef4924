#include "varconstrain/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "varconstrain/errors.hpp"

namespace varconstrain {

void PenaltySchedule::validate() const {
  if (!(mu1 > 0.0)) throw UsageError("penalty: mu1 must be > 0");
  if (!(r > 1.0)) throw UsageError("penalty: r must be > 1");
  if (!(mu_max >= mu1)) throw UsageError("penalty: mu_max must be >= mu1");
}

double mu(const PenaltySchedule& schedule, std::int64_t k) {
  if (k < 1) throw UsageError("mu: k must be >= 1");
  return std::min(schedule.mu1 * std::pow(schedule.r, static_cast<double>(k - 1)),
                  schedule.mu_max);
}

void LRSchedule::validate(std::int64_t total_steps) const {
  if (S0 <= 0) throw UsageError("lr: S0 must be > 0");
  if (!(L0 > 0.0) || !(D0 > 0.0)) throw UsageError("lr: L0 and D0 must be > 0");
  if (T <= total_steps && (!L1 || !D1 || !S1 || *S1 <= 0)) {
    throw UsageError("lr: tipping point T=" + std::to_string(T) +
                     " is reached, so L1, D1 and S1 > 0 are required");
  }
}

double delta(const LRSchedule& s, std::int64_t t) {
  if (t < 0) throw UsageError("delta: t must be >= 0");
  if (t < s.T) {
    const double phase = static_cast<double>(t % s.S0) / static_cast<double>(s.S0);
    return s.L0 * std::pow(s.D0, phase);
  }
  if (!s.L1 || !s.D1 || !s.S1) {
    throw UsageError("delta: t=" + std::to_string(t) + " is past the tipping point T=" +
                     std::to_string(s.T) + " but L1/D1/S1 are not configured");
  }
  return *s.L1 * std::pow(*s.D1, static_cast<double>(t - s.T) / static_cast<double>(*s.S1));
}

DerivedLR derive_lr_params(std::int64_t E, std::int64_t P, const PenaltySchedule& penalty) {
  if (E <= 0 || P <= 0) throw UsageError("derive_lr_params: E and P must be positive");
  if ((2 * E) % P != 0) {
    throw UsageError("derive_lr_params: 2E/P must be an integer (E=" + std::to_string(E) +
                     ", P=" + std::to_string(P) + ")");
  }
  DerivedLR out;
  out.S0 = 2 * E / P;
  const double ratio = 2.0 * static_cast<double>(E) * (penalty.mu_max - penalty.mu1) /
                       (static_cast<double>(P) * penalty.r);
  out.T = static_cast<std::int64_t>(std::floor(ratio));
  out.S1 = E - out.T;
  return out;
}

LRSchedule make_lr_schedule(double L0, double D0, std::optional<double> L1,
                            std::optional<double> D1, std::int64_t E, std::int64_t P,
                            const PenaltySchedule& penalty) {
  const DerivedLR d = derive_lr_params(E, P, penalty);
  LRSchedule s;
  s.L0 = L0;
  s.D0 = D0;
  s.S0 = d.S0;
  s.T = d.T;
  s.L1 = L1;
  s.D1 = D1;
  if (d.S1 > 0) s.S1 = d.S1;
  return s;
}

}  // namespace varconstrain
