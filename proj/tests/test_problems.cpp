#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "varconstrain/errors.hpp"
#include "varconstrain/problems.hpp"

using namespace varconstrain;
using std::numbers::pi;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

NetEval<double> constant_field(double c) {
  return [c](std::span<const Jet<double>> x) {
    return std::vector<Jet<double>>{constant_jet<double>(c, x[0].dim, x[0].order)};
  };
}

std::array<double, 3> unit(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

}  // namespace

TEST_CASE("minimal surface: helicoid values") {
  const auto p = make_minimal_surface();
  const auto truth = p->truth_net();
  const double fstar = 2 * pi * (std::sqrt(2.0) + std::asinh(1.0));
  CHECK(p->truth_objective() == doctest::Approx(fstar).epsilon(1e-15));
  CHECK(p->objective(truth) == doctest::Approx(fstar).epsilon(1e-12));
  CHECK(max_abs(p->constraint(truth).values) < 1e-15);
  // A flat u = c has area element r, so f = 4 pi * 1/2.
  CHECK(p->objective(constant_field(0.7)) == doctest::Approx(2 * pi).epsilon(1e-12));
  CHECK(p->z_norm() == doctest::Approx(std::sqrt(4 * pi)));
  CHECK(p->field(truth, std::vector<double>{0.5, 1.25})[0] == doctest::Approx(1.25));
}

TEST_CASE("W inner products") {
  const auto ms = make_minimal_surface();
  ConstraintValue<double> one{WKind::kBoundaryL2, 1, std::vector<double>(ms->boundary().size(), 1.0),
                              &ms->boundary()};
  CHECK(w_norm_sq(one) == doctest::Approx(4 * pi).epsilon(1e-13));
  const std::vector<double> lam(one.values.size(), 2.0);
  CHECK(w_pair<double>(lam, one) == doctest::Approx(8 * pi).epsilon(1e-13));
  CHECK(w_distance_sq<double>(one, lam) == doctest::Approx(4 * pi).epsilon(1e-13));

  const auto gs = make_grad_shafranov();
  ConstraintValue<double> g1{WKind::kBoundaryL2, 1, std::vector<double>(gs->boundary().size(), 1.0),
                             &gs->boundary()};
  CHECK(w_norm_sq(g1) == doctest::Approx(0.8).epsilon(1e-13));

  ProblemOptions o;
  o.nface = 3;
  const auto be = make_beltrami(o);
  ConstraintValue<double> b1{WKind::kBoundaryL2, 3,
                             std::vector<double>(be->boundary().size() * 3, 1.0), &be->boundary()};
  CHECK(w_norm_sq(b1) == doctest::Approx(18.0).epsilon(1e-13));

  ConstraintValue<double> bad = one;
  bad.values.pop_back();
  CHECK_THROWS_AS(w_norm_sq(bad), UsageError);
  CHECK_THROWS_AS(w_pair<double>(std::vector<double>{1.0}, one), UsageError);
  one.values[0] = std::nan("");
  CHECK_THROWS_AS(w_norm_sq(one), NumericError);
}

TEST_CASE("geodesic: great-circle arc") {
  const auto p = make_geodesic();
  const double t0 = pi / 4, t1 = 3 * pi / 4, f0 = 0.0, f1 = pi / 2;
  const auto a = unit(t0, f0), b = unit(t1, f1);
  const double angle = std::acos(a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
  CHECK(angle == doctest::Approx(2 * pi / 3).epsilon(1e-14));
  CHECK(p->truth_objective() == doctest::Approx(angle).epsilon(1e-13));
  const auto truth = p->truth_net();
  CHECK(p->objective(truth) == doctest::Approx(angle).epsilon(1e-9));
  CHECK(max_abs(p->constraint(truth).values) < 1e-12);
  // Every point of the truth lies in the plane through the origin and both ends.
  const std::array<double, 3> n{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                                a[0] * b[1] - a[1] * b[0]};
  const GreatCircle gc(t0, f0, t1, f1);
  for (int i = 0; i <= 20; ++i) {
    const double th = t0 + (t1 - t0) * i / 20.0;
    const auto q = unit(th, gc.phi(th));
    CHECK(std::abs(q[0] * n[0] + q[1] * n[1] + q[2] * n[2]) < 1e-12);
    if (i > 0 && i < 20) {
      const double h = 1e-6;
      const double fd = (gc.phi(th + h) - gc.phi(th - h)) / (2 * h);
      CHECK(gc.dphi(th) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
  // phi = const runs along a meridian: length theta1 - theta0.
  CHECK(p->objective(constant_field(0.3)) == doctest::Approx(pi / 2).epsilon(1e-13));
}

TEST_CASE("geodesic: sin(theta) u' = 3/4 gives integrand 5/4") {
  const auto p = make_geodesic();
  NetEval<double> u = [](std::span<const Jet<double>> x) {
    const double th = x[0].v;
    return std::vector<Jet<double>>{
        compose(x[0], 0.75 * std::log(std::tan(th / 2)), 0.75 / std::sin(th), 0.0)};
  };
  CHECK(p->objective(u) == doctest::Approx(1.25 * pi / 2).epsilon(1e-13));
  const double d0 = 0.75 * std::log(std::tan(pi / 8));
  const double d1 = 0.75 * std::log(std::tan(3 * pi / 8)) - pi / 2;
  CHECK(p->constraint(u).values[0] == doctest::Approx(std::hypot(d0, d1)).epsilon(1e-14));
}

TEST_CASE("geodesic: endpoint handling") {
  CHECK_THROWS_AS(GreatCircle(1.0, 0.0, 0.5, 0.2), UsageError);
  CHECK_THROWS_AS(GreatCircle(0.0, 0.0, 0.5, 0.2), UsageError);
  // Same point written with a phi shifted by 2 pi is not the continuous branch.
  CHECK_THROWS_AS(GreatCircle(pi / 4, 0.0, 3 * pi / 4, pi / 2 + 2 * pi), UsageError);
  const GreatCircle shifted(pi / 4, 2 * pi, 3 * pi / 4, 2 * pi + pi / 2);
  CHECK(shifted.phi(pi / 2) == doctest::Approx(2 * pi + pi / 4).epsilon(1e-12));
}

TEST_CASE("geodesic: antipodal endpoints") {
  const GreatCircle gc(pi / 4, 0.0, 3 * pi / 4, pi);
  CHECK(gc.antipodal());
  CHECK(gc.central_angle() == doctest::Approx(pi));
  ProblemOptions o;
  o.phi1 = pi;
  // The only graph over theta is tangent to the parallels at both ends, so
  // dphi/dtheta blows up there and Gauss-Legendre converges slowly.
  double prev = 1.0;
  for (int n : {16, 64, 256}) {
    o.n1d = n;
    const auto p = make_geodesic(o);
    const auto truth = p->truth_net();
    const double err = std::abs(p->objective(truth) - pi);
    CHECK(err < prev);
    prev = err;
    CHECK(max_abs(p->constraint(truth).values) < 1e-12);
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("grad-shafranov: Solov'ev solution") {
  const auto p = make_grad_shafranov();
  const auto truth = p->truth_net();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ur(0.9, 1.1), uz(-0.1, 0.1);
  for (int i = 0; i < 50; ++i) {
    const double r = ur(rng), z = uz(rng);
    const std::vector<Jet<double>> x{lift<double>(r, 0, 2, 2), lift<double>(z, 1, 2, 2)};
    const auto u = truth(x);
    CHECK(u[0].v == doctest::Approx(grad_shafranov::solovev(r, z)).epsilon(1e-14));
    CHECK(std::abs(grad_shafranov::residual(u[0], r)) < 1e-12);
  }
  CHECK(p->objective(truth) < 1e-24);
  CHECK(max_abs(p->constraint(truth).values) < 1e-15);
  CHECK(p->z_norm() == doctest::Approx(std::sqrt(0.8)));
}

TEST_CASE("grad-shafranov operator on a polynomial") {
  // u = r^3 z^2: u_rr = 6 r z^2, u_zz = 2 r^3, u_r = 3 r^2 z^2.
  using namespace grad_shafranov;
  for (double r : {0.9, 1.0, 1.07}) {
    for (double z : {-0.1, 0.02, 0.08}) {
      const auto jr = lift<double>(r, 0, 2, 2), jz = lift<double>(z, 1, 2, 2);
      const auto u = jr * jr * jr * jz * jz;
      const double expect = 2 * r * r * r + 6 * r * z * z - 3 * r * z * z - kA * r * r - kB * kR * kR;
      CHECK(residual(u, r) == doctest::Approx(expect).epsilon(1e-13));
    }
  }
}

TEST_CASE("beltrami: curl of the potential") {
  ProblemOptions o;
  o.nface = 6;
  o.eval_n3d = 12;
  const auto p = make_beltrami(o);
  const auto truth = p->truth_net();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 30; ++i) {
    const std::vector<double> x{u(rng), u(rng), u(rng)};
    const auto f = p->field(truth, x);
    const auto b = p->truth(x);
    for (int k = 0; k < 3; ++k) CHECK(f[k] == doctest::Approx(b[k]).epsilon(1e-14));
  }
  CHECK(p->reported_objective(truth) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(max_abs(p->constraint(truth).values) < 1e-14);
  CHECK(p->z_norm() == doctest::Approx(std::sqrt(6.0)));
}

TEST_CASE("beltrami: div curl H = 0 for a network") {
  const Network net = init(NetworkSpec::parse("FF(6,2,3,3)"), 5);
  for (double t : {-0.4, 0.1, 0.3}) {
    const std::vector<Jet<double>> x{lift<double>(t, 0, 3, 2), lift<double>(0.2, 1, 3, 2),
                                     lift<double>(-t, 2, 3, 2)};
    const auto h = ff_forward<double>(net.spec, net.params, x);
    CHECK(std::abs(beltrami::curl_divergence(h)) < 1e-13);
  }
}

TEST_CASE("beltrami: Monte Carlo sample is redrawn") {
  ProblemOptions o;
  o.nface = 2;
  o.mc_points = 50;
  auto p = make_beltrami(o);
  const auto truth = p->truth_net();
  const double a = p->objective(truth);
  p->resample(o.mc_seed);
  CHECK(p->objective(truth) == a);
  p->resample(o.mc_seed + 1);
  CHECK(p->objective(truth) != a);
}

TEST_CASE("loss gradients for every problem") {
  ProblemOptions o;
  o.n1d = 6;
  o.n2d = 4;
  o.nface = 2;
  o.mc_points = 8;
  struct Case {
    const char* name;
    const char* net;
  };
  for (const Case c : {Case{"minimal-surface", "FF(3,2,2,1)"}, Case{"geodesic", "LSTM(3,1,1,1)"},
                       Case{"grad-shafranov", "LSTM(3,1,2,1)"}, Case{"beltrami", "FF(3,1,3,3)"}}) {
    const auto problem = make_problem(c.name, o);
    const NetworkSpec spec = NetworkSpec::parse(c.net);
    const Network net = init(spec, 11);
    const Problem* p = problem.get();
    ScalarMap f = [p, spec](Tape&, std::span<const Var> params) {
      const auto u = net_eval<Var>(spec, params);
      const Var obj = p->objective(u);
      const auto g = p->constraint(u);
      const std::vector<double> lam(g.values.size(), 0.3);
      const Var pen = w_norm_sq(g);
      const Var pair = w_pair<Var>(lam, g);
      return obj + Var(5.0) * pen + pair;
    };
    INFO(c.name);
    CHECK(check_gradient(f, net.params, 1e-3) < 1e-5);
  }
}

TEST_CASE("multiplier values at boundary nodes") {
  const auto p = make_grad_shafranov();
  const Network lam = init(NetworkSpec::parse("FF(4,1,2,1)"), 1);
  const auto v = multiplier_values<double>(*p, net_eval(lam));
  CHECK(v.values.size() == p->boundary().size());
  const auto pt = p->multiplier_points().point(3);
  CHECK(v.values[3] == doctest::Approx(evaluate(lam, std::vector<double>(pt.begin(), pt.end()))[0]));
  CHECK_THROWS_AS(multiplier_values<double>(*make_geodesic(), net_eval(lam)), UsageError);
  const Network wrong = init(NetworkSpec::parse("FF(4,1,2,2)"), 1);
  CHECK_THROWS_AS(multiplier_values<double>(*p, net_eval(wrong)), UsageError);
}

TEST_CASE("problem lookup") {
  CHECK(make_problem("beltrami", {})->net_out_dim() == 3);
  CHECK(make_problem("grad-shafranov")->needs_order2());
  CHECK_THROWS_AS(make_problem("plateau"), UsageError);
  const auto g = make_geodesic();
  const Network wide = init(NetworkSpec::parse("FF(2,1,1,2)"), 0);
  CHECK_THROWS_AS(g->objective(net_eval(wide)), UsageError);
}
