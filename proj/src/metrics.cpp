#include "varconstrain/metrics.hpp"

#include <cmath>

namespace varconstrain {

double absolute_error(const Problem& problem, const NetEval<double>& u) {
  const PointRule& rule = problem.error_rule();
  double num = 0.0;
  double vol = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto x = rule.point(i);
    const auto got = problem.field(u, x);
    const auto want = problem.truth(x);
    double sq = 0.0;
    for (std::size_t c = 0; c < want.size(); ++c) sq += (got[c] - want[c]) * (got[c] - want[c]);
    num += rule.weights[i] * sq;
    vol += rule.weights[i];
  }
  return std::sqrt(num / vol);
}

RelativeObjective relative_objective_error(const Problem& problem, const NetEval<double>& u) {
  const double f = problem.reported_objective(u);
  const double fstar = problem.truth_objective();
  if (std::abs(fstar) < 1e-12) return {std::abs(f), true};
  return {std::abs(f - fstar) / std::abs(fstar), false};
}

double constraint_error(const Problem& problem, const NetEval<double>& u) {
  return std::sqrt(w_norm_sq(problem.constraint(u))) / problem.z_norm();
}

ErrorTriple evaluate_errors(const Problem& problem, const NetEval<double>& u) {
  const auto rel = relative_objective_error(problem, u);
  return {absolute_error(problem, u), rel.value, constraint_error(problem, u), rel.fallback};
}

}  // namespace varconstrain
