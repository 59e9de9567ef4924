#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "varconstrain/metrics.hpp"
#include "varconstrain/optim.hpp"
#include "varconstrain/runner.hpp"

namespace varconstrain {

namespace {

using std::numbers::pi;

std::string sci(double x) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << x;
  return s.str();
}

CheckResult bound(const std::string& name, double value, double limit) {
  return {name, value <= limit, sci(value) + " <= " + sci(limit)};
}

CheckResult param_counts() {
  const std::pair<const char*, std::size_t> table[] = {
      {"LSTM(50,3,1,1)", 21051}, {"LSTM(50,3,2,1)", 21851}, {"LSTM(50,3,3,3)", 22753},
      {"FF(50,3,2,1)", 5301},    {"FF(50,3,1,1)", 5251},    {"FF(50,3,3,3)", 5453}};
  std::string bad;
  for (const auto& [spec, n] : table) {
    const auto got = param_count(NetworkSpec::parse(spec));
    if (got != n) bad += std::string(spec) + "=" + std::to_string(got) + " ";
  }
  return {"parameter counts", bad.empty(), bad.empty() ? "all six sizes match" : bad};
}

CheckResult quadrature_exactness() {
  double worst = 0.0;
  for (int n = 1; n <= 24; ++n) {
    const Rule1D r = gauss_legendre(n, -1.0, 2.0);
    const int deg = 2 * n - 1;
    double got = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) got += r.weights[i] * std::pow(r.nodes[i], deg);
    const double want = (std::pow(2.0, deg + 1) - std::pow(-1.0, deg + 1)) / (deg + 1);
    worst = std::max(worst, std::abs(got - want) / std::abs(want));
  }
  return bound("Gauss-Legendre exact to degree 2n-1 (n <= 24)", worst, 1e-12);
}

CheckResult loss_gradients() {
  ProblemOptions o;
  o.n1d = 5;
  o.n2d = 3;
  o.nface = 2;
  o.mc_points = 6;
  const std::pair<const char*, const char*> cases[] = {{"minimal-surface", "LSTM(4,2,2,1)"},
                                                       {"geodesic", "FF(4,2,1,1)"},
                                                       {"grad-shafranov", "FF(4,2,2,1)"},
                                                       {"beltrami", "LSTM(3,1,3,3)"}};
  double worst = 0.0;
  for (const auto& [name, net] : cases) {
    const auto problem = make_problem(name, o);
    const Problem* p = problem.get();
    const NetworkSpec spec = NetworkSpec::parse(net);
    const Network n = init(spec, 3);
    const std::size_t nlam = p->w_kind() == WKind::kFinite
                                 ? static_cast<std::size_t>(p->w_components())
                                 : p->boundary().size() * p->w_components();
    const std::vector<double> lam(nlam, 0.7);
    ScalarMap f = [p, spec, lam](Tape&, std::span<const Var> params) {
      const auto u = net_eval<Var>(spec, params);
      const Var obj = p->objective(u);
      const auto g = p->constraint(u);
      const Var a = w_norm_sq(g);
      const Var b = w_pair<Var>(lam, g);
      Sop<Var> s;
      s.add(obj);
      s.add_scaled(50.0, a);
      s.add(b);
      return s.finish();
    };
    worst = std::max(worst, check_gradient(f, n.params, 1e-3));
  }
  return bound("loss gradients vs central differences (4 problems)", worst, 1e-5);
}

CheckResult jet_derivatives() {
  const Network net = init(NetworkSpec::parse("LSTM(6,2,2,1)"), 9);
  const double x0 = 0.3, y0 = -0.4, h = 1e-4;
  auto val = [&](double x, double y) { return evaluate(net, std::vector<double>{x, y})[0]; };
  const std::vector<Jet<double>> x{lift<double>(x0, 0, 2, 2), lift<double>(y0, 1, 2, 2)};
  const auto j = forward<double>(net.spec, net.params, x)[0];
  double worst = 0.0;
  worst = std::max(worst, std::abs(j.g[0] - (val(x0 + h, y0) - val(x0 - h, y0)) / (2 * h)));
  worst = std::max(worst, std::abs(j.g[1] - (val(x0, y0 + h) - val(x0, y0 - h)) / (2 * h)));
  const double hxx = (val(x0 + h, y0) - 2 * val(x0, y0) + val(x0 - h, y0)) / (h * h);
  const double hxy = (val(x0 + h, y0 + h) - val(x0 + h, y0 - h) - val(x0 - h, y0 + h) +
                      val(x0 - h, y0 - h)) / (4 * h * h);
  worst = std::max(worst, std::abs(j.hess(0, 0) - hxx));
  worst = std::max(worst, std::abs(j.hess(0, 1) - hxy));
  return bound("jet gradient/Hessian vs finite differences", worst, 1e-4);
}

std::vector<CheckResult> truth_checks() {
  std::vector<CheckResult> out;
  {
    ProblemOptions o;
    o.n2d = 64;
    const auto p = make_minimal_surface(o);
    const double want = 2 * pi * (std::sqrt(2.0) + std::log(1 + std::sqrt(2.0)));
    out.push_back(bound("minimal surface f(helicoid)", std::abs(p->objective(p->truth_net()) - want), 1e-6));
    out.push_back(bound("minimal surface g(helicoid)",
                        constraint_error(*p, p->truth_net()), 1e-14));
  }
  {
    const auto p = make_grad_shafranov();
    const auto u = p->truth_net();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ur(0.9, 1.1), uz(-0.1, 0.1);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double r = ur(rng), z = uz(rng);
      const std::vector<Jet<double>> x{lift<double>(r, 0, 2, 2), lift<double>(z, 1, 2, 2)};
      worst = std::max(worst, std::abs(grad_shafranov::residual(u(x)[0], r)));
    }
    out.push_back(bound("Grad-Shafranov residual of the Solov'ev flux (100 points)", worst, 1e-12));
    out.push_back(bound("Grad-Shafranov f(truth)", p->objective(u), 1e-10));
  }
  {
    ProblemOptions o;
    o.nface = 4;
    o.mc_points = 100000;
    const auto p = make_beltrami(o);
    const auto u = p->truth_net();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> c(-0.5, 0.5);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const std::vector<double> x{c(rng), c(rng), c(rng)};
      const auto f = p->field(u, x);
      const auto b = p->truth(x);
      for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(f[k] - b[k]));
    }
    out.push_back(bound("Beltrami curl B = B (100 points)", worst, 1e-12));
    out.push_back(bound("Beltrami f(truth) on the tensor rule", std::abs(p->reported_objective(u) - 1.5), 1e-10));
    out.push_back(bound("Beltrami f(truth), Monte Carlo N=1e5, relative",
                        std::abs(p->objective(u) - 1.5) / 1.5, 1e-2));
  }
  {
    const auto p = make_geodesic();
    const double t0 = pi / 4, t1 = 3 * pi / 4;
    const double c = std::sin(t0) * std::sin(t1) * std::cos(pi / 2) + std::cos(t0) * std::cos(t1);
    out.push_back(bound("geodesic f(truth) vs central angle",
                        std::abs(p->objective(p->truth_net()) - std::acos(c)), 1e-8));
  }
  return out;
}

CheckResult schedules() {
  const PenaltySchedule ms{100, 1.01, 5000};
  const LRSchedule lr = make_lr_schedule(1e-4, 0.1, {}, {}, 20000, 1000, ms);
  const DerivedLR geo = derive_lr_params(50000, 2500, {100, 1.01, 500});
  const bool ok = mu(ms, 1) == 100 && std::abs(mu(ms, 2) - 101) < 1e-12 && mu(ms, 394) < 5000 &&
                  mu(ms, 395) == 5000 && delta(lr, 0) == 1e-4 && delta(lr, 40) == 1e-4 &&
                  std::abs(delta(lr, 20) - 1e-4 * std::pow(10.0, -0.5)) < 1e-18 && geo.T == 15841;
  return {"penalty and learning-rate schedules", ok, ok ? "mu, delta and T values match" : "mismatch"};
}

CheckResult adam_first_step() {
  AdamState s = AdamState::zeros(1);
  std::vector<double> p{1.0};
  const std::vector<double> g{3.0};
  adam_step(s, p, g, 0.1);
  return bound("Adam first step moves by lr", std::abs(p[0] - 0.9), 1e-8);
}

}  // namespace

std::vector<CheckResult> verify_invariants() {
  std::vector<CheckResult> out;
  auto guarded = [&](const std::string& name, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  guarded("parameter counts", [&] { out.push_back(param_counts()); });
  guarded("quadrature", [&] { out.push_back(quadrature_exactness()); });
  guarded("gradients", [&] { out.push_back(loss_gradients()); });
  guarded("jets", [&] { out.push_back(jet_derivatives()); });
  guarded("truth oracles", [&] {
    for (auto& c : truth_checks()) out.push_back(c);
  });
  guarded("schedules", [&] { out.push_back(schedules()); });
  guarded("adam", [&] { out.push_back(adam_first_step()); });
  return out;
}

}  // namespace varconstrain
