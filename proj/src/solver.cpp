#include "varconstrain/solver.hpp"

#include <chrono>
#include <cmath>

#include "varconstrain/errors.hpp"

namespace varconstrain {

std::string method_name(Method method) {
  switch (method) {
    case Method::kPenalty:
      return "penalty";
    case Method::kALFinite:
      return "al-f";
    case Method::kALInfinite:
      return "al-inf";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "penalty") return Method::kPenalty;
  if (text == "al-f") return Method::kALFinite;
  if (text == "al-inf") return Method::kALInfinite;
  throw UsageError("unknown method '" + std::string(text) + "' (expected penalty, al-f or al-inf)");
}

void SolverConfig::validate(const Problem& problem) const {
  if (E <= 0 || P <= 0) throw UsageError("config: E and P must be positive");
  if (E % P != 0) {
    throw UsageError("config: P = " + std::to_string(P) + " does not divide E = " + std::to_string(E));
  }
  if (method == Method::kALInfinite && Q() % 2 != 0) {
    throw UsageError("config: al-inf splits Q = " + std::to_string(Q()) + " in half; Q must be even");
  }
  if (log_every <= 0) throw UsageError("config: log_every must be positive");
  penalty.validate();
  const std::int64_t lr_steps = method == Method::kALInfinite ? P * QA() : E;
  lr.validate(lr_steps);
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1 && eps > 0)) {
    throw UsageError("config: need 0 <= beta1, beta2 < 1 and eps > 0");
  }
  solution.validate();
  if (solution.in_dim != problem.net_in_dim() || solution.out_dim != problem.net_out_dim()) {
    throw UsageError("config: solution network " + solution.to_string() + " must map " +
                     std::to_string(problem.net_in_dim()) + " -> " +
                     std::to_string(problem.net_out_dim()) + " for " + problem.name());
  }
  if (method == Method::kALFinite && problem.w_kind() != WKind::kFinite) {
    throw UsageError("config: al-f needs a finite-dimensional constraint; " + problem.name() +
                     " constrains a function (use al-inf)");
  }
  if (method == Method::kALInfinite) {
    if (problem.w_kind() != WKind::kBoundaryL2) {
      throw UsageError("config: al-inf needs a function-valued constraint; " + problem.name() +
                       " has a finite one (use al-f)");
    }
    multiplier.validate();
    if (multiplier.in_dim != problem.multiplier_points().dim ||
        multiplier.out_dim != problem.w_components()) {
      throw UsageError("config: multiplier network " + multiplier.to_string() + " must map " +
                       std::to_string(problem.multiplier_points().dim) + " -> " +
                       std::to_string(problem.w_components()) + " for " + problem.name());
    }
  }
}

RunState initial_state(const Problem& problem, const SolverConfig& config) {
  RunState s;
  s.solution = init(config.solution, config.seed);
  s.adam_solution = AdamState::zeros(s.solution.params.size(), config.beta1, config.beta2, config.eps);
  if (config.method == Method::kALFinite) s.lambda.assign(problem.w_components(), 0.0);
  if (config.method == Method::kALInfinite) {
    s.multiplier = init(config.multiplier, config.seed + 1);
    s.adam_multiplier =
        AdamState::zeros(s.multiplier.params.size(), config.beta1, config.beta2, config.eps);
  }
  return s;
}

double Stepper::gradient(std::span<const double> params, const LossBuilder& loss,
                         std::vector<double>& grad) {
  tape_.clear();
  leaves_.clear();
  for (double p : params) leaves_.push_back(tape_.variable(p));
  const Var out = loss(leaves_);
  const double value = out.value();
  if (!std::isfinite(value)) throw NumericError("non-finite loss");
  grad.assign(params.size(), 0.0);
  if (!out.is_constant()) {
    tape_.backward(out, adjoint_);
    std::copy(adjoint_.begin(), adjoint_.begin() + static_cast<std::ptrdiff_t>(params.size()),
              grad.begin());
  }
  return value;
}

double Stepper::step(std::span<double> params, AdamState& adam, const LossBuilder& loss, double lr) {
  const double value = gradient(params, loss, grad_);
  adam_step(adam, params, grad_, lr);
  return value;
}

double subproblem_descent(Stepper& stepper, std::span<double> params, AdamState& adam,
                          const LossBuilder& loss, std::int64_t steps,
                          const std::function<double(std::int64_t)>& lr) {
  double last = std::numeric_limits<double>::quiet_NaN();
  for (std::int64_t j = 1; j <= steps; ++j) last = stepper.step(params, adam, loss, lr(j));
  return last;
}

Var augmented_loss(const Problem& problem, const NetEval<Var>& u, double mu,
                   std::span<const double> lambda) {
  const Var f = problem.objective(u);
  const auto g = problem.constraint(u);
  const Var norm = w_norm_sq(g);
  const Var pair = lambda.empty() ? Var(0.0) : w_pair<Var>(lambda, g);
  Sop<Var> s;
  s.add(f);
  s.add_scaled(0.5 * mu, norm);
  s.add(pair);
  return s.finish();
}

Var fit_loss(const Problem& problem, const NetEval<Var>& xi, std::span<const double> target) {
  return w_distance_sq(multiplier_values<Var>(problem, xi), target);
}

double multiplier_fit(Stepper& stepper, const Problem& problem, Network& xi, AdamState& adam,
                      std::span<const double> target, std::int64_t steps,
                      const std::function<double(std::int64_t)>& lr) {
  for (double t : target) {
    if (!std::isfinite(t)) throw NumericError("multiplier fit: non-finite target");
  }
  const NetworkSpec spec = xi.spec;
  const LossBuilder loss = [&](std::span<const Var> p) {
    return fit_loss(problem, net_eval<Var>(spec, p), target);
  };
  return subproblem_descent(stepper, xi.params, adam, loss, steps, lr);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void solve(Problem& problem, const SolverConfig& config, RunState& state, const SolverHooks& hooks,
           std::int64_t max_subproblems) {
  config.validate(problem);
  const std::int64_t QA = config.QA();
  const std::int64_t QB = config.QB();
  Stepper stepper;

  auto after_step = [&](double mu) {
    if (state.iteration() % config.log_every != 0) return;
    RunRow row;
    row.iteration = state.iteration();
    row.wall_time_s = state.wall_time_s;
    row.loss = state.last_loss;
    row.mu = mu;
    row.errors = evaluate_errors(problem, net_eval(state.solution));
    state.record.push_back(row);
    if (hooks.row) hooks.row(row);
  };

  for (std::int64_t done = 0; state.k < config.P && done < max_subproblems; ++done) {
    const std::int64_t k = state.k + 1;
    const double mu_k = mu(config.penalty, k);

    std::vector<double> lambda_nodes;
    if (config.method == Method::kALFinite) lambda_nodes = state.lambda;
    if (config.method == Method::kALInfinite) {
      const auto t0 = Clock::now();
      lambda_nodes = multiplier_values<double>(problem, net_eval(state.multiplier)).values;
      state.wall_time_s += seconds_since(t0);
    }

    const NetworkSpec spec = state.solution.spec;
    const LossBuilder loss = [&](std::span<const Var> p) {
      return augmented_loss(problem, net_eval<Var>(spec, p), mu_k, lambda_nodes);
    };
    for (std::int64_t j = 1; j <= QA; ++j) {
      const auto t0 = Clock::now();
      if (config.mc_resample) problem.resample(config.mc_seed + static_cast<std::uint64_t>(state.eta_steps));
      const double lr = delta(config.lr, (k - 1) * QA + j);
      state.last_loss = stepper.step(state.solution.params, state.adam_solution, loss, lr);
      ++state.eta_steps;
      state.wall_time_s += seconds_since(t0);
      after_step(mu_k);
    }

    if (config.method == Method::kALFinite) {
      const auto t0 = Clock::now();
      const auto g = problem.constraint(net_eval(state.solution));
      g.validate();
      const double scale = config.unscaled_update ? 1.0 : mu_k;
      for (std::size_t i = 0; i < state.lambda.size(); ++i) state.lambda[i] += scale * g.values[i];
      state.wall_time_s += seconds_since(t0);
    }

    if (config.method == Method::kALInfinite) {
      auto t0 = Clock::now();
      const auto g = problem.constraint(net_eval(state.solution));
      g.validate();
      std::vector<double> target = lambda_nodes;
      for (std::size_t i = 0; i < target.size(); ++i) target[i] += mu_k * g.values[i];
      const NetworkSpec mspec = state.multiplier.spec;
      const LossBuilder fit = [&](std::span<const Var> p) {
        return fit_loss(problem, net_eval<Var>(mspec, p), target);
      };
      state.wall_time_s += seconds_since(t0);
      for (std::int64_t j = 1; j <= QB; ++j) {
        t0 = Clock::now();
        const double lr = delta(config.lr, (k - 1) * QB + j);
        stepper.step(state.multiplier.params, state.adam_multiplier, fit, lr);
        ++state.xi_steps;
        state.wall_time_s += seconds_since(t0);
        after_step(mu_k);
      }
    }

    state.k = k;
    if (hooks.subproblem_done) hooks.subproblem_done(state);
  }
}

namespace {
RunResult run_method(Problem& problem, SolverConfig config, Method method) {
  config.method = method;
  RunState state = initial_state(problem, config);
  solve(problem, config, state);
  return {state.solution, state.record, state.wall_time_s};
}
}  // namespace

RunResult solve_penalty(Problem& problem, const SolverConfig& config) {
  return run_method(problem, config, Method::kPenalty);
}
RunResult solve_al_finite(Problem& problem, const SolverConfig& config) {
  return run_method(problem, config, Method::kALFinite);
}
RunResult solve_al_infinite(Problem& problem, const SolverConfig& config) {
  return run_method(problem, config, Method::kALInfinite);
}

}  // namespace varconstrain
