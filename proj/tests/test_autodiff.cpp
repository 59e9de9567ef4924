#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "varconstrain/autodiff.hpp"

using namespace varconstrain;

TEST_CASE("gradient of a product and a sum") {
  Tape tape;
  Var x = var(tape, 3.0);
  Var y = var(tape, 4.0);
  Var z = x * y + x;
  const auto g = backward(tape, z, std::vector<Var>{x, y});
  CHECK(z.value() == 15.0);
  CHECK(g[0] == 5.0);
  CHECK(g[1] == 3.0);
}

TEST_CASE("tanh derivative") {
  Tape tape;
  Var x = var(tape, 0.0);
  Var y = tanh(x);
  const auto g = backward(tape, y, std::vector<Var>{x});
  CHECK(y.value() == 0.0);
  CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("constants create no nodes") {
  Tape tape;
  Var a = 2.0;
  Var b = 5.0;
  Var c = a * b + tanh(a);
  CHECK(c.is_constant());
  CHECK(tape.size() == 0);
  CHECK(c.value() == doctest::Approx(10.0 + std::tanh(2.0)));
}

TEST_CASE("gradient of an unused variable is zero") {
  Tape tape;
  Var x = var(tape, 1.0);
  Var y = var(tape, 2.0);
  Var z = square(x);
  const auto g = backward(tape, z, std::vector<Var>{x, y});
  CHECK(g[0] == 2.0);
  CHECK(g[1] == 0.0);
}

TEST_CASE("errors") {
  Tape tape;
  Var x = var(tape, 0.0);
  CHECK_THROWS_AS(recip(x), SingularityError);
  CHECK_THROWS_AS(var(tape, 1.0) / x, SingularityError);
  CHECK_THROWS_AS(sqrt(var(tape, -1.0)), DomainError);
  CHECK_THROWS_AS(sqrt(x), SingularityError);
  Tape other;
  Var w = var(other, 1.0);
  CHECK_THROWS_AS(x + w, UsageError);
  std::vector<double> adj;
  CHECK_THROWS_AS(tape.backward(w, adj), UsageError);
}

TEST_CASE("guarded sqrt keeps the exact value and a finite slope at 0") {
  Tape tape;
  Var x = var(tape, 0.0);
  Var y = guarded_sqrt(x, 1e-24);
  const auto g = backward(tape, y, std::vector<Var>{x});
  CHECK(y.value() == 0.0);
  CHECK(std::isfinite(g[0]));
  CHECK(g[0] == doctest::Approx(0.5e12));
}

TEST_CASE("replay reproduces forward values") {
  Tape tape;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Var> xs;
  for (int i = 0; i < 6; ++i) xs.push_back(var(tape, u(rng)));
  Var acc = 0.5;
  for (int i = 0; i < 6; ++i) acc = acc * tanh(xs[i]) + sin(xs[(i + 1) % 6]) - cos(xs[i]) / 3.0;
  const auto replayed = tape.replay();
  for (std::size_t n = 0; n < tape.size(); ++n) CHECK(replayed[n] == doctest::Approx(tape.value(n)).epsilon(1e-15));
}

TEST_CASE("gradient check on random compositions") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> point(4);
    for (auto& p : point) p = u(rng);
    const double c = u(rng);
    ScalarMap f = [c](Tape&, std::span<const Var> x) {
      Var s = sqrt(1.5 + x[0] * x[0]);
      Var t = tanh(x[1] * x[2] + c) * sin(x[3]);
      Var r = recip(2.0 + cos(x[0] - x[3]));
      return s * t + r - x[2] * x[2] * x[1];
    };
    CHECK(check_gradient(f, point, 1e-3) < 1e-6);
  }
}

TEST_CASE("weighted sum is a single node") {
  Tape tape;
  std::vector<Var> xs{var(tape, 1.0), var(tape, 2.0), var(tape, 3.0)};
  const std::size_t before = tape.size();
  const std::vector<double> w{0.5, 0.25, 2.0};
  Var s = weighted_sum<Var>(w, xs);
  CHECK(tape.size() == before + 1);
  CHECK(s.value() == 0.5 + 0.5 + 6.0);
  const auto g = backward(tape, s, xs);
  CHECK(g == w);
}

TEST_CASE("double and Var paths agree bit for bit") {
  const double a = 0.3;
  const double b = -1.7;
  const double plain = std::tanh(a * b + 1.0) * std::sqrt(a * a + 2.0);
  Tape tape;
  Var x = var(tape, a);
  Var y = var(tape, b);
  Var v = tanh(x * y + 1.0) * sqrt(x * x + 2.0);
  CHECK(v.value() == plain);
}
