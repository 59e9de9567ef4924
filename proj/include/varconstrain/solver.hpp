#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "varconstrain/metrics.hpp"
#include "varconstrain/nets.hpp"
#include "varconstrain/optim.hpp"
#include "varconstrain/problems.hpp"
#include "varconstrain/schedule.hpp"

namespace varconstrain {

enum class Method { kPenalty, kALFinite, kALInfinite };

/// "penalty" | "al-f" | "al-inf"
std::string method_name(Method method);
Method parse_method(std::string_view text);

struct SolverConfig {
  Method method = Method::kPenalty;
  std::int64_t E = 5000;
  std::int64_t P = 250;
  PenaltySchedule penalty;
  LRSchedule lr;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  NetworkSpec solution;
  /// Multiplier network; only read by al-inf.
  NetworkSpec multiplier;
  std::uint64_t seed = 0;
  std::int64_t log_every = 100;
  /// al-f: lambda += g instead of lambda += mu_k g.
  bool unscaled_update = false;
  /// Redraw the Monte Carlo sample before every solution step.
  bool mc_resample = false;
  std::uint64_t mc_seed = 20240101;

  std::int64_t Q() const { return E / P; }
  /// Solution and multiplier steps per subproblem (al-inf splits Q evenly).
  std::int64_t QA() const { return method == Method::kALInfinite ? Q() / 2 : Q(); }
  std::int64_t QB() const { return method == Method::kALInfinite ? Q() / 2 : 0; }

  void validate(const Problem& problem) const;
};

struct RunRow {
  std::int64_t iteration = 0;
  double wall_time_s = 0.0;
  double loss = 0.0;
  double mu = 0.0;
  ErrorTriple errors;
};

struct RunState {
  Network solution;
  /// al-inf only.
  Network multiplier;
  /// al-f only: one entry per constraint component.
  std::vector<double> lambda;
  AdamState adam_solution;
  AdamState adam_multiplier;
  /// Completed subproblems.
  std::int64_t k = 0;
  std::int64_t eta_steps = 0;
  std::int64_t xi_steps = 0;
  /// Training time only; metric evaluation is excluded.
  double wall_time_s = 0.0;
  /// Most recent solution-step loss.
  double last_loss = std::numeric_limits<double>::quiet_NaN();
  std::vector<RunRow> record;

  std::int64_t iteration() const { return eta_steps + xi_steps; }
};

RunState initial_state(const Problem& problem, const SolverConfig& config);

struct SolverHooks {
  std::function<void(const RunRow&)> row;
  std::function<void(const RunState&)> subproblem_done;
};

/// Runs the remaining subproblems k+1..P (at most `max_subproblems` of them).
/// A failing step throws NumericError and leaves `state` as it was before that step.
void solve(Problem& problem, const SolverConfig& config, RunState& state,
           const SolverHooks& hooks = {},
           std::int64_t max_subproblems = std::numeric_limits<std::int64_t>::max());

struct RunResult {
  Network solution;
  std::vector<RunRow> record;
  double wall_time_s = 0.0;
};

RunResult solve_penalty(Problem& problem, const SolverConfig& config);
RunResult solve_al_finite(Problem& problem, const SolverConfig& config);
RunResult solve_al_infinite(Problem& problem, const SolverConfig& config);

// ---- building blocks ----

using LossBuilder = std::function<Var(std::span<const Var> params)>;

/// Reusable tape for repeated loss/gradient evaluations.
class Stepper {
 public:
  /// Loss value and its gradient with respect to `params`.
  double gradient(std::span<const double> params, const LossBuilder& loss, std::vector<double>& grad);
  /// One Adam step; throws NumericError on a non-finite loss or gradient before touching anything.
  double step(std::span<double> params, AdamState& adam, const LossBuilder& loss, double lr);

 private:
  Tape tape_;
  std::vector<Var> leaves_;
  std::vector<double> adjoint_;
  std::vector<double> grad_;
};

/// `steps` Adam steps with learning rate lr(j), j = 1..steps. Returns the last loss.
double subproblem_descent(Stepper& stepper, std::span<double> params, AdamState& adam,
                          const LossBuilder& loss, std::int64_t steps,
                          const std::function<double(std::int64_t)>& lr);

/// f(u) + mu/2 |g(u)|^2 + <lambda, g(u)>; empty lambda drops the pairing.
Var augmented_loss(const Problem& problem, const NetEval<Var>& u, double mu,
                   std::span<const double> lambda);

/// |lambda_xi - target|_W^2 at the boundary nodes.
Var fit_loss(const Problem& problem, const NetEval<Var>& xi, std::span<const double> target);

/// `steps` Adam steps of the multiplier network towards frozen node targets.
double multiplier_fit(Stepper& stepper, const Problem& problem, Network& xi, AdamState& adam,
                      std::span<const double> target, std::int64_t steps,
                      const std::function<double(std::int64_t)>& lr);

}  // namespace varconstrain
