#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "varconstrain/jet.hpp"

using namespace varconstrain;

namespace {

// A smooth 2D test function through every jet primitive.
template <class T>
Jet<T> probe(const Jet<T>& x, const Jet<T>& y) {
  Jet<T> a = tanh(x * y + x);
  Jet<T> b = sqrt(x * x + y * y + constant_jet<T>(T(1.0), x.dim, x.order));
  Jet<T> c = sin(y) * cos(x) / (constant_jet<T>(T(2.0), x.dim, x.order) + x * x);
  return mul_add(a, b, c, y);
}

double probe_value(double x, double y) {
  Jet<double> jx = constant_jet<double>(x, 2, 0);
  Jet<double> jy = constant_jet<double>(y, 2, 0);
  return probe(jx, jy).v;
}

}  // namespace

TEST_CASE("jet of x * x at 3") {
  Jet<double> x = lift<double>(3.0, 0, 1, 2);
  Jet<double> y = x * x;
  CHECK(y.v == 9.0);
  CHECK(y.g[0] == 6.0);
  CHECK(y.hess(0, 0) == 2.0);
}

TEST_CASE("spatial gradient and Hessian match finite differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double x0 = u(rng);
    const double y0 = u(rng);
    Jet<double> x = lift<double>(x0, 0, 2, 2);
    Jet<double> y = lift<double>(y0, 1, 2, 2);
    Jet<double> j = probe(x, y);
    CHECK(j.v == probe_value(x0, y0));
    const double h = 1e-5;
    const double fx = (probe_value(x0 + h, y0) - probe_value(x0 - h, y0)) / (2 * h);
    const double fy = (probe_value(x0, y0 + h) - probe_value(x0, y0 - h)) / (2 * h);
    CHECK(j.g[0] == doctest::Approx(fx).epsilon(1e-7));
    CHECK(j.g[1] == doctest::Approx(fy).epsilon(1e-7));
    const double k = 1e-4;
    const double c = probe_value(x0, y0);
    const double fxx = (probe_value(x0 + k, y0) - 2 * c + probe_value(x0 - k, y0)) / (k * k);
    const double fyy = (probe_value(x0, y0 + k) - 2 * c + probe_value(x0, y0 - k)) / (k * k);
    const double fxy = (probe_value(x0 + k, y0 + k) - probe_value(x0 + k, y0 - k) -
                        probe_value(x0 - k, y0 + k) + probe_value(x0 - k, y0 - k)) /
                       (4 * k * k);
    CHECK(std::abs(j.hess(0, 0) - fxx) < 1e-4 * (1 + std::abs(fxx)));
    CHECK(std::abs(j.hess(1, 1) - fyy) < 1e-4 * (1 + std::abs(fyy)));
    CHECK(std::abs(j.hess(0, 1) - fxy) < 1e-4 * (1 + std::abs(fxy)));
    CHECK(j.hess(0, 1) == j.hess(1, 0));
  }
}

TEST_CASE("Var jets carry parameter gradients") {
  Tape tape;
  Var w = var(tape, 0.7);
  Jet<Var> x = lift<Var>(0.4, 0, 1, 2);
  Jet<Var> wj = constant_jet<Var>(w, 1, 2);
  Jet<Var> y = tanh(wj * x);
  // d/dw of the spatial second derivative w^2 tanh''(w x).
  ScalarMap f = [](Tape& t, std::span<const Var> p) {
    Jet<Var> xx = lift<Var>(0.4, 0, 1, 2);
    Jet<Var> ww = constant_jet<Var>(p[0], 1, 2);
    (void)t;
    return tanh(ww * xx).hess(0, 0);
  };
  const std::vector<double> point{0.7};
  CHECK(check_gradient(f, point, 1e-3) < 1e-6);
  const double t = std::tanh(0.28);
  CHECK(y.hess(0, 0).value() == doctest::Approx(0.49 * (-2.0 * t * (1 - t * t))));
}

TEST_CASE("shape errors") {
  Jet<double> a = lift<double>(1.0, 0, 1, 1);
  Jet<double> b = lift<double>(1.0, 0, 2, 1);
  CHECK_THROWS_AS(a + b, UsageError);
  CHECK_THROWS_AS(lift<double>(1.0, 2, 2, 1), UsageError);
  CHECK_THROWS_AS(constant_jet<double>(1.0, 4, 1), UsageError);
  CHECK_THROWS_AS(recip(constant_jet<double>(0.0, 1, 1)), SingularityError);
  CHECK_THROWS_AS(sqrt(constant_jet<double>(-1.0, 1, 1)), DomainError);
}
