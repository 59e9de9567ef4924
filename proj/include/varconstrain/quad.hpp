#pragma once

#include <cstdint>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "varconstrain/autodiff.hpp"

namespace varconstrain {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

/// An interval, rectangle or box: the product of its `bounds`.
struct Domain {
  enum class Kind { kInterval, kRectangle, kBox };
  Kind kind = Kind::kInterval;
  std::vector<Interval> bounds;

  static Domain interval(double lo, double hi);
  static Domain rectangle(Interval x, Interval y);
  static Domain box(Interval x, Interval y, Interval z);

  int dim() const { return static_cast<int>(bounds.size()); }
  double measure() const;
  bool contains(std::span<const double> x) const;
};

/// Gauss-Legendre rule on (a, b).
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  double a = -1.0;
  double b = 1.0;
};

/// Tensor product of two 1D rules; point (i, j) is (first.nodes[i], second.nodes[j]).
struct Rule2D {
  Rule1D first;
  Rule1D second;
};

/// A weighted point set in `dim` dimensions (row-major points).
struct PointRule {
  int dim = 1;
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  double total_weight() const;
};

/// Quadrature nodes on the pieces of a boundary (or on a constraint interval).
/// `piece[i]` names the edge/face a node belongs to.
struct BoundaryRule : PointRule {
  std::vector<int> piece;
};

/// Uniform sample of a box, drawn once from a seeded generator.
struct MCSample {
  int dim = 3;
  std::vector<double> points;
  double volume = 1.0;
  std::uint64_t seed = 0;
  std::size_t count = 0;

  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// Nodes are the roots of P_n mapped to (a, b), polished by Newton's method.
Rule1D gauss_legendre(int n, double a, double b);

Rule2D tensor_rule(const Rule1D& first, const Rule1D& second);
PointRule to_points(const Rule1D& rule);
PointRule to_points(const Rule2D& rule);
/// Tensor-product Gauss-Legendre rule with n nodes per axis over a domain.
PointRule tensor_rule(const Domain& domain, int n);

MCSample mc_sample(const Domain& box, std::size_t count, std::uint64_t seed);

/// Interval: GL rule over the interval itself. Rectangle: n GL nodes per edge
/// (pieces 0..3 = r-lo, r-hi, z-lo, z-hi). Box: n x n GL nodes per face
/// (pieces 0..5 = x-lo, x-hi, y-lo, y-hi, z-lo, z-hi).
BoundaryRule boundary_rule(const Domain& domain, int n_per_piece);

namespace quad_detail {
template <class R>
R sum(std::span<const double> weights, std::span<const R> terms) {
  return weighted_sum<R>(weights, terms);
}
}  // namespace quad_detail

/// sum_i w_i f(x_i). Returns a Var (one node) when the integrand yields Vars.
template <class F>
auto integrate_1d(const Rule1D& rule, F&& integrand) {
  using R = std::decay_t<decltype(integrand(0.0))>;
  std::vector<R> values;
  values.reserve(rule.nodes.size());
  for (double x : rule.nodes) values.push_back(integrand(x));
  return quad_detail::sum<R>(rule.weights, values);
}

template <class F>
auto integrate_2d(const Rule2D& rule, F&& integrand) {
  using R = std::decay_t<decltype(integrand(0.0, 0.0))>;
  std::vector<R> values;
  std::vector<double> weights;
  values.reserve(rule.first.nodes.size() * rule.second.nodes.size());
  weights.reserve(values.capacity());
  for (std::size_t i = 0; i < rule.first.nodes.size(); ++i) {
    for (std::size_t j = 0; j < rule.second.nodes.size(); ++j) {
      values.push_back(integrand(rule.first.nodes[i], rule.second.nodes[j]));
      weights.push_back(rule.first.weights[i] * rule.second.weights[j]);
    }
  }
  return quad_detail::sum<R>(weights, values);
}

/// sum_i w_i f(point_i) for any weighted point set.
template <class F>
auto integrate(const PointRule& rule, F&& integrand) {
  using R = std::decay_t<decltype(integrand(std::span<const double>{}))>;
  std::vector<R> values;
  values.reserve(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) values.push_back(integrand(rule.point(i)));
  return quad_detail::sum<R>(rule.weights, values);
}

/// volume * mean of the integrand over the sample.
template <class F>
auto mc_integrate(const MCSample& sample, F&& integrand) {
  using R = std::decay_t<decltype(integrand(std::span<const double>{}))>;
  std::vector<R> values;
  values.reserve(sample.count);
  for (std::size_t i = 0; i < sample.count; ++i) values.push_back(integrand(sample.point(i)));
  const std::vector<double> ones(sample.count, 1.0);
  const R total = quad_detail::sum<R>(ones, values);
  return R(total * (sample.volume / static_cast<double>(sample.count)));
}

}  // namespace varconstrain
