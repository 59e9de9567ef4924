#pragma once

#include <cstdint>
#include <optional>

namespace varconstrain {

/// Stopped geometric penalty factor: mu_k = min(mu1 * r^(k-1), mu_max).
struct PenaltySchedule {
  double mu1 = 100.0;
  double r = 1.01;
  double mu_max = 5000.0;

  void validate() const;
};

double mu(const PenaltySchedule& schedule, std::int64_t k);

/// Learning rate that restarts every S0 steps until the tipping point T, then
/// decays geometrically:
///   t <  T: L0 * D0^((t mod S0) / S0)
///   t >= T: L1 * D1^((t - T) / S1)
/// The tail (L1, D1, S1) is only needed when T is reachable.
struct LRSchedule {
  double L0 = 1e-4;
  double D0 = 1e-1;
  std::int64_t S0 = 40;
  std::int64_t T = 0;
  std::optional<double> L1;
  std::optional<double> D1;
  std::optional<std::int64_t> S1;

  void validate(std::int64_t total_steps) const;
};

double delta(const LRSchedule& schedule, std::int64_t t);

struct DerivedLR {
  std::int64_t S0 = 0;
  std::int64_t T = 0;
  std::int64_t S1 = 0;  // E - T; negative when T > E (tail unused)
};

/// S0 = 2E/P, T = floor(2E(mu_max - mu1) / (P r)), S1 = E - T.
/// Throws UsageError when 2E/P is not an integer.
DerivedLR derive_lr_params(std::int64_t E, std::int64_t P, const PenaltySchedule& penalty);

/// Builds a complete LRSchedule from the rate hyperparameters and the derived step counts.
LRSchedule make_lr_schedule(double L0, double D0, std::optional<double> L1,
                            std::optional<double> D1, std::int64_t E, std::int64_t P,
                            const PenaltySchedule& penalty);

}  // namespace varconstrain
