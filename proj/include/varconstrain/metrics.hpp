#pragma once

#include "varconstrain/problems.hpp"

namespace varconstrain {

struct ErrorTriple {
  double absolute = 0.0;
  double relative_objective = 0.0;
  double constraint = 0.0;
  /// relative_objective holds |f(u)| because f(u_true) is (numerically) zero.
  bool relative_fallback = false;
};

/// RMS of field(u) - truth over problem.error_rule(), summed over components.
double absolute_error(const Problem& problem, const NetEval<double>& u);

struct RelativeObjective {
  double value = 0.0;
  bool fallback = false;
};

/// |f(u) - f*| / |f*|, or |f(u)| with fallback set when |f*| < 1e-12.
RelativeObjective relative_objective_error(const Problem& problem, const NetEval<double>& u);

/// |g(u)|_W / Z.
double constraint_error(const Problem& problem, const NetEval<double>& u);

ErrorTriple evaluate_errors(const Problem& problem, const NetEval<double>& u);

}  // namespace varconstrain
