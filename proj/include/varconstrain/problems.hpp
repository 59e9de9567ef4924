#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "varconstrain/jet.hpp"
#include "varconstrain/nets.hpp"
#include "varconstrain/quad.hpp"

namespace varconstrain {

/// A field evaluated on jets at one point: the network itself, or an oracle
/// that mimics it.
template <class T>
using NetEval = std::function<std::vector<Jet<T>>(std::span<const Jet<T>>)>;

/// Binds a network to its parameters. `params` must outlive the result.
template <class T>
NetEval<T> net_eval(const NetworkSpec& spec, std::span<const T> params) {
  auto ev = std::make_shared<Evaluator<T>>(spec, params);
  return [ev](std::span<const Jet<T>> x) { return (*ev)(x); };
}

inline NetEval<double> net_eval(const Network& net) {
  return net_eval<double>(net.spec, std::span<const double>(net.params));
}

enum class WKind { kFinite, kBoundaryL2 };

/// g(u) in W. Finite: the vector itself. BoundaryL2: g at every node of `rule`,
/// node-major with `components` entries per node.
template <class T>
struct ConstraintValue {
  WKind kind = WKind::kFinite;
  int components = 1;
  std::vector<T> values;
  const BoundaryRule* rule = nullptr;

  void validate() const;
};

/// |g|_W^2.
template <class T>
T w_norm_sq(const ConstraintValue<T>& g);

/// <lambda, g>_W with lambda laid out like g.values.
template <class T>
T w_pair(std::span<const double> lambda, const ConstraintValue<T>& g);

/// |a - target|_W^2 with target laid out like a.values.
template <class T>
T w_distance_sq(const ConstraintValue<T>& a, std::span<const double> target);

struct ProblemOptions {
  int n1d = 64;
  int n2d = 32;
  int nface = 16;
  std::size_t mc_points = 1000;
  std::uint64_t mc_seed = 20240101;
  int eval_n3d = 16;
  double theta0 = std::numbers::pi / 4;
  double phi0 = 0.0;
  double theta1 = 3 * std::numbers::pi / 4;
  double phi1 = std::numbers::pi / 2;
  /// Constraint-error normalization; 0 keeps the problem's default.
  double z_norm = 0.0;
};

/// min f(u) subject to g(u) = 0, with u represented by a network.
class Problem {
 public:
  virtual ~Problem() = default;

  const std::string& name() const { return name_; }
  const Domain& domain() const { return domain_; }
  int net_in_dim() const { return net_in_dim_; }
  int net_out_dim() const { return net_out_dim_; }
  /// Components of the solution u (after the solution map).
  int field_dim() const { return field_dim_; }
  int jet_order() const { return jet_order_; }
  bool needs_order2() const { return jet_order_ == 2; }
  WKind w_kind() const { return w_kind_; }
  /// Entries of g: components per node (BoundaryL2) or the vector length (finite).
  int w_components() const { return w_components_; }
  /// Nodes of the W inner product; empty for a finite W.
  const BoundaryRule& boundary() const { return boundary_; }
  /// Multiplier-network input at every boundary node, node-aligned with boundary().
  const PointRule& multiplier_points() const { return multiplier_points_; }
  double z_norm() const { return z_norm_; }
  /// Interior rule used for the absolute error and the reported objective.
  const PointRule& error_rule() const { return error_rule_; }
  double truth_objective() const { return truth_objective_; }

  /// Pointwise exact solution.
  virtual std::vector<double> truth(std::span<const double> x) const = 0;
  /// The exact solution in network form: field(truth_net(), x) == truth(x).
  virtual NetEval<double> truth_net() const = 0;

  /// f(u) on the training rule.
  virtual Var objective(const NetEval<Var>& u) const = 0;
  virtual double objective(const NetEval<double>& u) const = 0;
  /// f(u) on error_rule().
  virtual double reported_objective(const NetEval<double>& u) const { return objective(u); }

  virtual ConstraintValue<Var> constraint(const NetEval<Var>& u) const = 0;
  virtual ConstraintValue<double> constraint(const NetEval<double>& u) const = 0;

  /// Solution u at a point (applies the solution map to the network output).
  virtual std::vector<double> field(const NetEval<double>& u, std::span<const double> x) const;

  /// Redraws any Monte Carlo sample. No-op for deterministic rules.
  virtual void resample(std::uint64_t /*seed*/) {}

 protected:
  std::string name_;
  Domain domain_;
  int net_in_dim_ = 1;
  int net_out_dim_ = 1;
  int field_dim_ = 1;
  int jet_order_ = 1;
  WKind w_kind_ = WKind::kFinite;
  int w_components_ = 1;
  BoundaryRule boundary_;
  PointRule multiplier_points_;
  double z_norm_ = 1.0;
  PointRule error_rule_;
  double truth_objective_ = 0.0;
};

/// Multiplier network evaluated at every boundary node of `problem`.
template <class T>
ConstraintValue<T> multiplier_values(const Problem& problem, const NetEval<T>& lambda);

std::unique_ptr<Problem> make_minimal_surface(const ProblemOptions& options = {});
std::unique_ptr<Problem> make_geodesic(const ProblemOptions& options = {});
std::unique_ptr<Problem> make_grad_shafranov(const ProblemOptions& options = {});
std::unique_ptr<Problem> make_beltrami(const ProblemOptions& options = {});

/// minimal-surface | geodesic | grad-shafranov | beltrami
std::unique_ptr<Problem> make_problem(const std::string& name, const ProblemOptions& options = {});

/// Shorter arc of the great circle through two points of the unit sphere, as
/// phi(theta). Antipodal endpoints pick the circle whose normal lies in the
/// plane of the z axis and the first point.
class GreatCircle {
 public:
  GreatCircle(double theta0, double phi0, double theta1, double phi1);

  double central_angle() const { return alpha_; }
  bool antipodal() const { return antipodal_; }
  /// Continuous branch with phi(theta0) = phi0 and phi(theta1) = phi1.
  double phi(double theta) const;
  double dphi(double theta) const;

 private:
  std::array<double, 3> at(double t) const;
  std::array<double, 3> tangent(double t) const;
  double t_of(double theta) const;
  double unwrapped(double t) const;

  double theta0_, theta1_;
  std::array<double, 3> p0_{}, q_{};
  double alpha_ = 0.0;
  bool antipodal_ = false;
  std::vector<double> sample_t_, sample_phi_;
};

namespace grad_shafranov {
inline constexpr double kR = 1.0;
inline constexpr double kA = 1.2;
inline constexpr double kB = -1.0;
inline constexpr double kC0 = 1.1;

/// Solov'ev flux u(r, z).
double solovev(double r, double z);

/// u_zz + u_rr - u_r / r - a r^2 - b R^2 for a jet of order 2 in (r, z).
template <class T>
T residual(const Jet<T>& u, double r) {
  Sop<T> s;
  s.add(u.hess(1, 1));
  s.add(u.hess(0, 0));
  s.add_scaled(-1.0 / r, u.g[0]);
  s.add(T(-kA * r * r - kB * kR * kR));
  return s.finish();
}
}  // namespace grad_shafranov

namespace beltrami {
/// Boundary data (sin z + cos y, sin x + cos z, sin y + cos x).
std::array<double, 3> field(double x, double y, double z);

/// curl of a 3-vector of order >= 1 jets in (x, y, z).
template <class T>
std::array<T, 3> curl(std::span<const Jet<T>> h) {
  return {h[2].g[1] - h[1].g[2], h[0].g[2] - h[2].g[0], h[1].g[0] - h[0].g[1]};
}

/// Divergence of curl(h) from the Hessians of an order-2 jet triple.
double curl_divergence(std::span<const Jet<double>> h);
}  // namespace beltrami

}  // namespace varconstrain
