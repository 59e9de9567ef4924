#include "varconstrain/quad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "varconstrain/errors.hpp"

namespace varconstrain {

Domain Domain::interval(double lo, double hi) { return Domain{Kind::kInterval, {{lo, hi}}}; }

Domain Domain::rectangle(Interval x, Interval y) { return Domain{Kind::kRectangle, {x, y}}; }

Domain Domain::box(Interval x, Interval y, Interval z) { return Domain{Kind::kBox, {x, y, z}}; }

double Domain::measure() const {
  double m = 1.0;
  for (const auto& b : bounds) m *= b.length();
  return m;
}

bool Domain::contains(std::span<const double> x) const {
  if (x.size() != bounds.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < bounds[i].lo || x[i] > bounds[i].hi) return false;
  }
  return true;
}

double PointRule::total_weight() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw UsageError("gauss_legendre: n must be >= 1");
  if (!(a < b)) throw UsageError("gauss_legendre: need a < b");
  Rule1D rule;
  rule.a = a;
  rule.b = b;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int roots = (n + 1) / 2;
  for (int i = 0; i < roots; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) <= 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged || !std::isfinite(z)) {
      throw NumericError("gauss_legendre: Newton iteration did not converge for n=" +
                         std::to_string(n));
    }
    // Recompute P_n' at the polished root for the weight.
    {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
    }
    const double w = 2.0 * half / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = mid;
  return rule;
}

Rule2D tensor_rule(const Rule1D& first, const Rule1D& second) { return Rule2D{first, second}; }

PointRule to_points(const Rule1D& rule) {
  PointRule out;
  out.dim = 1;
  out.points = rule.nodes;
  out.weights = rule.weights;
  return out;
}

PointRule to_points(const Rule2D& rule) {
  PointRule out;
  out.dim = 2;
  for (std::size_t i = 0; i < rule.first.nodes.size(); ++i) {
    for (std::size_t j = 0; j < rule.second.nodes.size(); ++j) {
      out.points.push_back(rule.first.nodes[i]);
      out.points.push_back(rule.second.nodes[j]);
      out.weights.push_back(rule.first.weights[i] * rule.second.weights[j]);
    }
  }
  return out;
}

PointRule tensor_rule(const Domain& domain, int n) {
  PointRule out;
  out.dim = domain.dim();
  std::vector<Rule1D> axes;
  for (const auto& b : domain.bounds) axes.push_back(gauss_legendre(n, b.lo, b.hi));
  std::vector<std::size_t> idx(axes.size(), 0);
  const std::size_t total = static_cast<std::size_t>(std::pow(n, axes.size()) + 0.5);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    double w = 1.0;
    std::vector<double> p(axes.size());
    for (std::size_t d = axes.size(); d-- > 0;) {
      const std::size_t k = rem % n;
      rem /= n;
      p[d] = axes[d].nodes[k];
      w *= axes[d].weights[k];
    }
    out.points.insert(out.points.end(), p.begin(), p.end());
    out.weights.push_back(w);
  }
  return out;
}

MCSample mc_sample(const Domain& box, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw UsageError("mc_sample: need at least one point");
  MCSample sample;
  sample.dim = box.dim();
  sample.volume = box.measure();
  sample.seed = seed;
  sample.count = count;
  sample.points.reserve(count * box.bounds.size());
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> axes;
  for (const auto& b : box.bounds) axes.emplace_back(b.lo, b.hi);
  for (std::size_t i = 0; i < count; ++i) {
    for (auto& axis : axes) sample.points.push_back(axis(rng));
  }
  return sample;
}

BoundaryRule boundary_rule(const Domain& domain, int n_per_piece) {
  BoundaryRule out;
  out.dim = domain.dim();
  switch (domain.kind) {
    case Domain::Kind::kInterval: {
      const Rule1D r = gauss_legendre(n_per_piece, domain.bounds[0].lo, domain.bounds[0].hi);
      out.points = r.nodes;
      out.weights = r.weights;
      out.piece.assign(r.nodes.size(), 0);
      return out;
    }
    case Domain::Kind::kRectangle: {
      int piece = 0;
      for (int axis = 0; axis < 2; ++axis) {
        const int other = 1 - axis;
        const Rule1D r =
            gauss_legendre(n_per_piece, domain.bounds[other].lo, domain.bounds[other].hi);
        for (double fixed : {domain.bounds[axis].lo, domain.bounds[axis].hi}) {
          for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            double p[2];
            p[axis] = fixed;
            p[other] = r.nodes[i];
            out.points.insert(out.points.end(), p, p + 2);
            out.weights.push_back(r.weights[i]);
            out.piece.push_back(piece);
          }
          ++piece;
        }
      }
      return out;
    }
    case Domain::Kind::kBox: {
      int piece = 0;
      for (int axis = 0; axis < 3; ++axis) {
        const int u = (axis + 1) % 3;
        const int v = (axis + 2) % 3;
        const int first = std::min(u, v);
        const int second = std::max(u, v);
        const Rule1D ru =
            gauss_legendre(n_per_piece, domain.bounds[first].lo, domain.bounds[first].hi);
        const Rule1D rv =
            gauss_legendre(n_per_piece, domain.bounds[second].lo, domain.bounds[second].hi);
        for (double fixed : {domain.bounds[axis].lo, domain.bounds[axis].hi}) {
          for (std::size_t i = 0; i < ru.nodes.size(); ++i) {
            for (std::size_t j = 0; j < rv.nodes.size(); ++j) {
              double p[3];
              p[axis] = fixed;
              p[first] = ru.nodes[i];
              p[second] = rv.nodes[j];
              out.points.insert(out.points.end(), p, p + 3);
              out.weights.push_back(ru.weights[i] * rv.weights[j]);
              out.piece.push_back(piece);
            }
          }
          ++piece;
        }
      }
      return out;
    }
  }
  throw UsageError("boundary_rule: unsupported domain");
}

}  // namespace varconstrain
