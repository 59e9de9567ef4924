#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "varconstrain/quad.hpp"

using namespace varconstrain;
using std::numbers::pi;

TEST_CASE("textbook Gauss-Legendre rules") {
  const Rule1D two = gauss_legendre(2, -1.0, 1.0);
  CHECK(two.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(two.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(two.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  const Rule1D one = gauss_legendre(1, 0.0, 2.0);
  CHECK(one.nodes[0] == 1.0);
  CHECK(one.weights[0] == doctest::Approx(2.0).epsilon(1e-15));
  const Rule1D five = gauss_legendre(5, -1.0, 1.0);
  CHECK(std::abs(integrate_1d(five, [](double x) { return std::pow(x, 9); })) < 1e-14);
  CHECK_THROWS_AS(gauss_legendre(0, 0.0, 1.0), UsageError);
  CHECK_THROWS_AS(gauss_legendre(3, 1.0, 1.0), UsageError);
}

TEST_CASE("rule invariants") {
  for (int n : {1, 2, 3, 7, 16, 32, 64, 100}) {
    const Rule1D r = gauss_legendre(n, -0.3, 2.2);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      CHECK(r.weights[i] > 0.0);
      CHECK(r.nodes[i] > -0.3);
      CHECK(r.nodes[i] < 2.2);
      if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
      sum += r.weights[i];
    }
    CHECK(std::abs(sum - 2.5) < 1e-12);
  }
}

TEST_CASE("polynomial exactness up to degree 2n-1") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 1; n <= 20; ++n) {
    const double a = -0.7;
    const double b = 1.3;
    const Rule1D r = gauss_legendre(n, a, b);
    std::vector<double> c(2 * n);
    for (auto& ci : c) ci = u(rng);
    auto poly = [&](double x) {
      double s = 0.0;
      for (int k = 2 * n - 1; k >= 0; --k) s = s * x + c[k];
      return s;
    };
    double exact = 0.0;
    for (int k = 0; k < 2 * n; ++k) exact += c[k] * (std::pow(b, k + 1) - std::pow(a, k + 1)) / (k + 1);
    CHECK(std::abs(integrate_1d(r, poly) - exact) < 1e-12);
  }
}

TEST_CASE("integrals") {
  const Rule1D r5 = gauss_legendre(5, 0.0, 1.0);
  CHECK(integrate_1d(r5, [](double x) { return std::pow(x, 4); }) == doctest::Approx(0.2).epsilon(1e-14));
  const Rule1D r64 = gauss_legendre(64, 0.0, 1.0);
  const double half_helicoid = (std::sqrt(2.0) + std::log(1.0 + std::sqrt(2.0))) / 2.0;
  CHECK(std::abs(integrate_1d(r64, [](double r) { return std::sqrt(1 + r * r); }) - half_helicoid) < 1e-9);
  const Rule1D theta = gauss_legendre(64, -2 * pi, 2 * pi);
  CHECK(integrate_1d(theta, [](double) { return 1.0; }) == doctest::Approx(4 * pi).epsilon(1e-14));

  const Rule2D gs = tensor_rule(gauss_legendre(8, 0.9, 1.1), gauss_legendre(8, -0.1, 0.1));
  CHECK(integrate_2d(gs, [](double, double) { return 1.0; }) == doctest::Approx(0.04).epsilon(1e-12));
  const Rule2D helicoid = tensor_rule(gauss_legendre(64, 0.0, 1.0), gauss_legendre(64, -2 * pi, 2 * pi));
  CHECK(std::abs(integrate_2d(helicoid, [](double r, double) { return std::sqrt(r * r + 1); }) -
                 4 * pi * half_helicoid) < 1e-6);
  const Rule2D sym = tensor_rule(gauss_legendre(6, -1.0, 1.0), gauss_legendre(6, -1.0, 1.0));
  CHECK(std::abs(integrate_2d(sym, [](double x, double y) { return x * y; })) < 1e-15);
  const PointRule pts = to_points(helicoid);
  CHECK(std::abs(pts.total_weight() - 4 * pi) < 1e-10);
}

TEST_CASE("linearity") {
  const PointRule r = tensor_rule(Domain::box({-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}), 5);
  auto f = [](std::span<const double> p) { return std::sin(p[0]) * std::exp(p[1]) + p[2]; };
  auto g = [](std::span<const double> p) { return std::cos(p[0] * p[1] * p[2]); };
  const double lhs = integrate(r, [&](std::span<const double> p) { return 2.5 * f(p) - 1.5 * g(p); });
  CHECK(std::abs(lhs - (2.5 * integrate(r, f) - 1.5 * integrate(r, g))) < 1e-12);
  CHECK(std::abs(r.total_weight() - 1.0) < 1e-12);
}

TEST_CASE("Monte Carlo") {
  const Domain cube = Domain::box({-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5});
  const MCSample s = mc_sample(cube, 1000, 12345);
  CHECK(mc_integrate(s, [](std::span<const double>) { return 1.0; }) == 1.0);
  for (std::size_t i = 0; i < s.count; ++i) CHECK(cube.contains(s.point(i)));
  const MCSample t = mc_sample(cube, 1000, 12345);
  CHECK(s.points == t.points);
  auto energy = [](std::span<const double> p) {
    const double x = p[0], y = p[1], z = p[2];
    const double a = std::sin(z) + std::cos(y);
    const double b = std::sin(x) + std::cos(z);
    const double c = std::sin(y) + std::cos(x);
    return 0.5 * (a * a + b * b + c * c);
  };
  const MCSample big = mc_sample(cube, 100000, 7);
  CHECK(std::abs(mc_integrate(big, energy) - 1.5) < 0.02);

  // Spread across seeds is consistent with sigma / sqrt(N).
  const int seeds = 40;
  const std::size_t n = 500;
  std::vector<double> est;
  for (int k = 0; k < seeds; ++k) est.push_back(mc_integrate(mc_sample(cube, n, 1000 + k), energy));
  double mean = 0.0;
  for (double e : est) mean += e;
  mean /= seeds;
  double var = 0.0;
  for (double e : est) var += (e - mean) * (e - mean);
  var /= seeds - 1;
  double pop_mean = 0.0, pop_sq = 0.0;
  for (std::size_t i = 0; i < big.count; ++i) {
    const double e = energy(big.point(i));
    pop_mean += e;
    pop_sq += e * e;
  }
  pop_mean /= static_cast<double>(big.count);
  const double sigma2 = pop_sq / static_cast<double>(big.count) - pop_mean * pop_mean;
  const double ratio = var / (sigma2 / n);
  // chi^2 with 39 dof: 0.5% / 99.5% quantiles are about 20.0 and 65.5.
  CHECK(ratio * (seeds - 1) > 20.0);
  CHECK(ratio * (seeds - 1) < 65.5);
  CHECK_THROWS_AS(mc_sample(cube, 0, 1), UsageError);
}

TEST_CASE("boundary rules") {
  const BoundaryRule rect = boundary_rule(Domain::rectangle({0.9, 1.1}, {-0.1, 0.1}), 16);
  CHECK(std::abs(rect.total_weight() - 0.8) < 1e-12);
  CHECK(rect.size() == 64);
  for (std::size_t i = 0; i < rect.size(); ++i) {
    const auto p = rect.point(i);
    const bool on_edge = std::abs(p[0] - 0.9) < 1e-15 || std::abs(p[0] - 1.1) < 1e-15 ||
                         std::abs(p[1] + 0.1) < 1e-15 || std::abs(p[1] - 0.1) < 1e-15;
    CHECK(on_edge);
  }
  const BoundaryRule cube = boundary_rule(Domain::box({-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}), 4);
  CHECK(std::abs(cube.total_weight() - 6.0) < 1e-12);
  CHECK(cube.size() == 96);
  for (std::size_t i = 0; i < cube.size(); ++i) {
    const auto p = cube.point(i);
    int on = 0;
    for (double c : p) on += std::abs(std::abs(c) - 0.5) < 1e-15;
    CHECK(on >= 1);
  }
  const BoundaryRule seg = boundary_rule(Domain::interval(-2 * pi, 2 * pi), 64);
  CHECK(std::abs(seg.total_weight() - 4 * pi) < 1e-12);
}

TEST_CASE("Var integrands produce one differentiable node") {
  Tape tape;
  Var a = var(tape, 2.0);
  const Rule1D r = gauss_legendre(4, 0.0, 1.0);
  Var s = integrate_1d(r, [&](double x) { return a * x; });
  CHECK(s.value() == doctest::Approx(1.0).epsilon(1e-15));
  const auto g = backward(tape, s, std::vector<Var>{a});
  CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-15));
}
