#include "varconstrain/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "varconstrain/errors.hpp"

namespace varconstrain {

using std::numbers::pi;

template <class T>
void ConstraintValue<T>::validate() const {
  if (kind == WKind::kBoundaryL2) {
    if (rule == nullptr) throw UsageError("constraint: boundary value without a rule");
    if (values.size() != rule->size() * static_cast<std::size_t>(components)) {
      throw UsageError("constraint: " + std::to_string(values.size()) + " values for " +
                       std::to_string(rule->size()) + " nodes x " + std::to_string(components) +
                       " components");
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(value_of(values[i]))) {
      throw NumericError("constraint: non-finite value at entry " + std::to_string(i));
    }
  }
}

template <class T>
T w_norm_sq(const ConstraintValue<T>& g) {
  g.validate();
  if (g.kind == WKind::kFinite) {
    Sop<T> s;
    for (const T& v : g.values) s.add(v, v);
    return s.finish();
  }
  const std::size_t nodes = g.rule->size();
  std::vector<T> per_node;
  per_node.reserve(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    Sop<T> s;
    for (int c = 0; c < g.components; ++c) {
      const T& v = g.values[i * g.components + c];
      s.add(v, v);
    }
    per_node.push_back(s.finish());
  }
  return weighted_sum<T>(g.rule->weights, per_node);
}

template <class T>
T w_pair(std::span<const double> lambda, const ConstraintValue<T>& g) {
  g.validate();
  if (lambda.size() != g.values.size()) {
    throw UsageError("w_pair: multiplier has " + std::to_string(lambda.size()) +
                     " entries, constraint has " + std::to_string(g.values.size()));
  }
  std::vector<double> coef(lambda.begin(), lambda.end());
  if (g.kind == WKind::kBoundaryL2) {
    for (std::size_t i = 0; i < coef.size(); ++i) coef[i] *= g.rule->weights[i / g.components];
  }
  return weighted_sum<T>(coef, g.values);
}

template <class T>
T w_distance_sq(const ConstraintValue<T>& a, std::span<const double> target) {
  if (target.size() != a.values.size()) {
    throw UsageError("w_distance_sq: target has " + std::to_string(target.size()) +
                     " entries, expected " + std::to_string(a.values.size()));
  }
  ConstraintValue<T> d;
  d.kind = a.kind;
  d.components = a.components;
  d.rule = a.rule;
  d.values.reserve(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    Sop<T> s;
    s.add(a.values[i]);
    s.add(T(-target[i]));
    d.values.push_back(s.finish());
  }
  return w_norm_sq(d);
}

template struct ConstraintValue<double>;
template struct ConstraintValue<Var>;
template double w_norm_sq(const ConstraintValue<double>&);
template Var w_norm_sq(const ConstraintValue<Var>&);
template double w_pair(std::span<const double>, const ConstraintValue<double>&);
template Var w_pair(std::span<const double>, const ConstraintValue<Var>&);
template double w_distance_sq(const ConstraintValue<double>&, std::span<const double>);
template Var w_distance_sq(const ConstraintValue<Var>&, std::span<const double>);

std::vector<double> Problem::field(const NetEval<double>& u, std::span<const double> x) const {
  std::vector<Jet<double>> in;
  for (double xi : x) in.push_back(constant_jet<double>(xi, static_cast<int>(x.size()), 0));
  const auto out = u(in);
  std::vector<double> values;
  for (const auto& o : out) values.push_back(o.v);
  return values;
}

template <class T>
ConstraintValue<T> multiplier_values(const Problem& problem, const NetEval<T>& lambda) {
  if (problem.w_kind() != WKind::kBoundaryL2) {
    throw UsageError("multiplier_values: " + problem.name() + " has a finite-dimensional W");
  }
  const PointRule& pts = problem.multiplier_points();
  ConstraintValue<T> cv;
  cv.kind = WKind::kBoundaryL2;
  cv.components = problem.w_components();
  cv.rule = &problem.boundary();
  cv.values.reserve(pts.size() * cv.components);
  std::vector<Jet<T>> x(pts.dim);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto p = pts.point(i);
    for (int d = 0; d < pts.dim; ++d) x[d] = constant_jet<T>(T(p[d]), pts.dim, 0);
    const auto out = lambda(x);
    if (static_cast<int>(out.size()) != cv.components) {
      throw UsageError("multiplier_values: multiplier network has " + std::to_string(out.size()) +
                       " outputs, W has " + std::to_string(cv.components) + " components");
    }
    for (const auto& o : out) cv.values.push_back(o.v);
  }
  return cv;
}

template ConstraintValue<double> multiplier_values(const Problem&, const NetEval<double>&);
template ConstraintValue<Var> multiplier_values(const Problem&, const NetEval<Var>&);

namespace {

template <class T, int N>
std::array<Jet<T>, N> lifted(std::span<const double> p, int order) {
  std::array<Jet<T>, N> x;
  for (int d = 0; d < N; ++d) x[d] = lift<T>(p[d], d, N, order);
  return x;
}

template <class T, int N>
std::array<Jet<T>, N> constants(std::span<const double> p) {
  std::array<Jet<T>, N> x;
  for (int d = 0; d < N; ++d) x[d] = constant_jet<T>(T(p[d]), N, 0);
  return x;
}

void check_outputs(const Problem& problem, std::size_t got) {
  if (static_cast<int>(got) != problem.net_out_dim()) {
    throw UsageError(problem.name() + ": network has " + std::to_string(got) + " outputs, expected " +
                     std::to_string(problem.net_out_dim()));
  }
}

template <class T>
T checked(T value, const char* what, std::span<const double> p) {
  if (!std::isfinite(value_of(value))) {
    std::string at;
    for (double c : p) at += (at.empty() ? "" : ", ") + std::to_string(c);
    throw NumericError(std::string(what) + ": non-finite integrand at (" + at + ")");
  }
  return value;
}

// Routes the double/Var virtuals to the derived class's templates.
template <class Derived>
class ProblemImpl : public Problem {
 public:
  Var objective(const NetEval<Var>& u) const override { return self().template objective_t<Var>(u); }
  double objective(const NetEval<double>& u) const override {
    return self().template objective_t<double>(u);
  }
  ConstraintValue<Var> constraint(const NetEval<Var>& u) const override {
    return self().template constraint_t<Var>(u);
  }
  ConstraintValue<double> constraint(const NetEval<double>& u) const override {
    return self().template constraint_t<double>(u);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

class MinimalSurface : public ProblemImpl<MinimalSurface> {
 public:
  explicit MinimalSurface(const ProblemOptions& o) {
    name_ = "minimal-surface";
    domain_ = Domain::rectangle({0.0, 1.0}, {-2 * pi, 2 * pi});
    net_in_dim_ = 2;
    net_out_dim_ = 1;
    field_dim_ = 1;
    jet_order_ = 1;
    w_kind_ = WKind::kBoundaryL2;
    w_components_ = 1;
    boundary_ = boundary_rule(Domain::interval(-2 * pi, 2 * pi), o.n1d);
    multiplier_points_ = boundary_;
    z_norm_ = o.z_norm > 0 ? o.z_norm : std::sqrt(4 * pi);
    interior_ = tensor_rule(domain_, o.n2d);
    error_rule_ = interior_;
    truth_objective_ = 2 * pi * (std::sqrt(2.0) + std::log(1.0 + std::sqrt(2.0)));
  }

  template <class T>
  T objective_t(const NetEval<T>& u) const {
    using std::sqrt;
    return integrate(interior_, [&](std::span<const double> p) {
      const auto x = lifted<T, 2>(p, 1);
      const auto out = u(x);
      check_outputs(*this, out.size());
      const double r = p[0];
      const T rur = T(r) * out[0].g[0];
      Sop<T> s;
      s.add(T(r * r));
      s.add(rur, rur);
      s.add(out[0].g[1], out[0].g[1]);
      return checked(sqrt(s.finish()), "minimal-surface objective", p);
    });
  }

  template <class T>
  ConstraintValue<T> constraint_t(const NetEval<T>& u) const {
    ConstraintValue<T> cv{WKind::kBoundaryL2, 1, {}, &boundary_};
    cv.values.reserve(boundary_.size());
    for (std::size_t i = 0; i < boundary_.size(); ++i) {
      const double theta = boundary_.point(i)[0];
      const double at[2] = {1.0, theta};
      const auto out = u(constants<T, 2>(at));
      check_outputs(*this, out.size());
      Sop<T> s;
      s.add(out[0].v);
      s.add(T(-theta));
      cv.values.push_back(s.finish());
    }
    return cv;
  }

  std::vector<double> truth(std::span<const double> x) const override { return {x[1]}; }

  NetEval<double> truth_net() const override {
    return [](std::span<const Jet<double>> x) { return std::vector<Jet<double>>{x[1]}; };
  }

 private:
  PointRule interior_;
};

class Geodesic : public ProblemImpl<Geodesic> {
 public:
  explicit Geodesic(const ProblemOptions& o)
      : circle_(o.theta0, o.phi0, o.theta1, o.phi1),
        theta0_(o.theta0),
        phi0_(o.phi0),
        theta1_(o.theta1),
        phi1_(o.phi1) {
    name_ = "geodesic";
    domain_ = Domain::interval(o.theta0, o.theta1);
    net_in_dim_ = 1;
    net_out_dim_ = 1;
    field_dim_ = 1;
    jet_order_ = 1;
    w_kind_ = WKind::kFinite;
    w_components_ = 1;
    z_norm_ = o.z_norm > 0 ? o.z_norm : 1.0;
    interior_ = to_points(gauss_legendre(o.n1d, o.theta0, o.theta1));
    error_rule_ = interior_;
    truth_objective_ = circle_.central_angle();
  }

  template <class T>
  T objective_t(const NetEval<T>& u) const {
    using std::sqrt;
    return integrate(interior_, [&](std::span<const double> p) {
      const auto out = u(lifted<T, 1>(p, 1));
      check_outputs(*this, out.size());
      const T s = T(std::sin(p[0])) * out[0].g[0];
      Sop<T> q;
      q.add(T(1.0));
      q.add(s, s);
      return checked(sqrt(q.finish()), "geodesic objective", p);
    });
  }

  template <class T>
  ConstraintValue<T> constraint_t(const NetEval<T>& u) const {
    auto gap = [&](double theta, double phi) {
      const double at[1] = {theta};
      const auto out = u(constants<T, 1>(at));
      check_outputs(*this, out.size());
      Sop<T> s;
      s.add(out[0].v);
      s.add(T(-phi));
      return s.finish();
    };
    const T d0 = gap(theta0_, phi0_);
    const T d1 = gap(theta1_, phi1_);
    Sop<T> s;
    s.add(d0, d0);
    s.add(d1, d1);
    ConstraintValue<T> cv;
    cv.kind = WKind::kFinite;
    cv.components = 1;
    cv.values.push_back(guarded_sqrt(s.finish(), 1e-24));
    return cv;
  }

  std::vector<double> truth(std::span<const double> x) const override {
    return {circle_.phi(x[0])};
  }

  NetEval<double> truth_net() const override {
    const GreatCircle circle = circle_;
    return [circle](std::span<const Jet<double>> x) {
      if (x[0].order > 1) throw UsageError("geodesic truth: only jets of order <= 1");
      const double theta = x[0].v;
      return std::vector<Jet<double>>{compose(x[0], circle.phi(theta), circle.dphi(theta), 0.0)};
    };
  }

 private:
  GreatCircle circle_;
  double theta0_, phi0_, theta1_, phi1_;
  PointRule interior_;
};

Jet<double> solovev_jet(const Jet<double>& r, const Jet<double>& z) {
  using namespace grad_shafranov;
  const Jet<double> zeta = scale_shift(1.0 / (2 * kR), r * r, -kR / 2);
  const Jet<double> z2 = z * z;
  const Jet<double> t1 = scale_shift(0.5 * (kB + kC0) * kR * kR, z2, 0.0);
  const Jet<double> t2 = scale_shift(kC0 * kR, zeta * z2, 0.0);
  const Jet<double> t3 = scale_shift(0.5 * (kA - kC0) * kR * kR, zeta * zeta, 0.0);
  return t1 + t2 + t3;
}

class GradShafranov : public ProblemImpl<GradShafranov> {
 public:
  explicit GradShafranov(const ProblemOptions& o) {
    using namespace grad_shafranov;
    name_ = "grad-shafranov";
    domain_ = Domain::rectangle({0.9 * kR, 1.1 * kR}, {-0.1 * kR, 0.1 * kR});
    net_in_dim_ = 2;
    net_out_dim_ = 1;
    field_dim_ = 1;
    jet_order_ = 2;
    w_kind_ = WKind::kBoundaryL2;
    w_components_ = 1;
    boundary_ = boundary_rule(domain_, o.nface);
    multiplier_points_ = boundary_;
    z_norm_ = o.z_norm > 0 ? o.z_norm : std::sqrt(0.8 * kR);
    interior_ = tensor_rule(domain_, o.n2d);
    error_rule_ = interior_;
    truth_objective_ = 0.0;
  }

  template <class T>
  T objective_t(const NetEval<T>& u) const {
    return integrate(interior_, [&](std::span<const double> p) {
      const auto out = u(lifted<T, 2>(p, 2));
      check_outputs(*this, out.size());
      const T res = grad_shafranov::residual(out[0], p[0]);
      return checked(T(res * res), "grad-shafranov objective", p);
    });
  }

  template <class T>
  ConstraintValue<T> constraint_t(const NetEval<T>& u) const {
    ConstraintValue<T> cv{WKind::kBoundaryL2, 1, {}, &boundary_};
    cv.values.reserve(boundary_.size());
    for (std::size_t i = 0; i < boundary_.size(); ++i) {
      const auto p = boundary_.point(i);
      const auto out = u(constants<T, 2>(p));
      check_outputs(*this, out.size());
      Sop<T> s;
      s.add(T(grad_shafranov::solovev(p[0], p[1])));
      s.add_scaled(-1.0, out[0].v);
      cv.values.push_back(s.finish());
    }
    return cv;
  }

  std::vector<double> truth(std::span<const double> x) const override {
    return {grad_shafranov::solovev(x[0], x[1])};
  }

  NetEval<double> truth_net() const override {
    return [](std::span<const Jet<double>> x) {
      return std::vector<Jet<double>>{solovev_jet(x[0], x[1])};
    };
  }

 private:
  PointRule interior_;
};

class Beltrami : public ProblemImpl<Beltrami> {
 public:
  explicit Beltrami(const ProblemOptions& o) : mc_points_(o.mc_points) {
    name_ = "beltrami";
    domain_ = Domain::box({-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5});
    net_in_dim_ = 3;
    net_out_dim_ = 3;
    field_dim_ = 3;
    jet_order_ = 1;
    w_kind_ = WKind::kBoundaryL2;
    w_components_ = 3;
    boundary_ = boundary_rule(domain_, o.nface);
    multiplier_points_ = boundary_;
    z_norm_ = o.z_norm > 0 ? o.z_norm : std::sqrt(6.0);
    sample_ = mc_sample(domain_, o.mc_points, o.mc_seed);
    error_rule_ = tensor_rule(domain_, o.eval_n3d);
    truth_objective_ = 1.5;
  }

  template <class T>
  T energy_density(const NetEval<T>& u, std::span<const double> p) const {
    const auto h = u(lifted<T, 3>(p, 1));
    check_outputs(*this, h.size());
    const auto c = beltrami::curl<T>(h);
    Sop<T> s;
    for (const T& ci : c) s.add(ci, ci);
    return checked(s.finish(), "beltrami objective", p);
  }

  template <class T>
  T objective_t(const NetEval<T>& u) const {
    const T total = mc_integrate(sample_, [&](std::span<const double> p) {
      return energy_density<T>(u, p);
    });
    return T(0.5) * total;
  }

  double reported_objective(const NetEval<double>& u) const override {
    return 0.5 * integrate(error_rule_, [&](std::span<const double> p) {
             return energy_density<double>(u, p);
           });
  }

  template <class T>
  ConstraintValue<T> constraint_t(const NetEval<T>& u) const {
    ConstraintValue<T> cv{WKind::kBoundaryL2, 3, {}, &boundary_};
    cv.values.reserve(boundary_.size() * 3);
    for (std::size_t i = 0; i < boundary_.size(); ++i) {
      const auto p = boundary_.point(i);
      const auto h = u(lifted<T, 3>(p, 1));
      check_outputs(*this, h.size());
      const auto c = beltrami::curl<T>(h);
      const auto b = beltrami::field(p[0], p[1], p[2]);
      for (int k = 0; k < 3; ++k) {
        Sop<T> s;
        s.add(c[k]);
        s.add(T(-b[k]));
        cv.values.push_back(s.finish());
      }
    }
    return cv;
  }

  std::vector<double> field(const NetEval<double>& u, std::span<const double> x) const override {
    const auto h = u(lifted<double, 3>(x, 1));
    check_outputs(*this, h.size());
    const auto c = beltrami::curl<double>(h);
    return {c[0], c[1], c[2]};
  }

  std::vector<double> truth(std::span<const double> x) const override {
    const auto b = beltrami::field(x[0], x[1], x[2]);
    return {b[0], b[1], b[2]};
  }

  // curl B = B, so B itself is a potential for the exact field.
  NetEval<double> truth_net() const override {
    return [](std::span<const Jet<double>> x) {
      return std::vector<Jet<double>>{sin(x[2]) + cos(x[1]), sin(x[0]) + cos(x[2]),
                                      sin(x[1]) + cos(x[0])};
    };
  }

  void resample(std::uint64_t seed) override { sample_ = mc_sample(domain_, mc_points_, seed); }

 private:
  std::size_t mc_points_;
  MCSample sample_;
};

}  // namespace

std::unique_ptr<Problem> make_minimal_surface(const ProblemOptions& o) {
  return std::make_unique<MinimalSurface>(o);
}
std::unique_ptr<Problem> make_geodesic(const ProblemOptions& o) {
  return std::make_unique<Geodesic>(o);
}
std::unique_ptr<Problem> make_grad_shafranov(const ProblemOptions& o) {
  return std::make_unique<GradShafranov>(o);
}
std::unique_ptr<Problem> make_beltrami(const ProblemOptions& o) {
  return std::make_unique<Beltrami>(o);
}

std::unique_ptr<Problem> make_problem(const std::string& name, const ProblemOptions& o) {
  if (name == "minimal-surface") return make_minimal_surface(o);
  if (name == "geodesic") return make_geodesic(o);
  if (name == "grad-shafranov") return make_grad_shafranov(o);
  if (name == "beltrami") return make_beltrami(o);
  throw UsageError("unknown problem '" + name +
                   "' (expected minimal-surface, geodesic, grad-shafranov or beltrami)");
}

// ---- great circle ----

namespace {
std::array<double, 3> unit(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}
double dot(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
std::array<double, 3> normalized(std::array<double, 3> a) {
  const double n = std::sqrt(dot(a, a));
  for (auto& c : a) c /= n;
  return a;
}
constexpr int kSamples = 4096;
}  // namespace

GreatCircle::GreatCircle(double theta0, double phi0, double theta1, double phi1)
    : theta0_(theta0), theta1_(theta1) {
  if (!(0.0 < theta0 && theta0 < theta1 && theta1 < pi)) {
    throw UsageError("geodesic: need 0 < theta0 < theta1 < pi");
  }
  p0_ = unit(theta0, phi0);
  const auto p1 = unit(theta1, phi1);
  const double c = std::clamp(dot(p0_, p1), -1.0, 1.0);
  if (c > 1.0 - 1e-15) throw UsageError("geodesic: endpoints coincide");
  if (c < -1.0 + 1e-12) {
    antipodal_ = true;
    alpha_ = pi;
    const std::array<double, 3> zhat{0.0, 0.0, 1.0};
    auto n = zhat;
    const double zp = dot(zhat, p0_);
    for (int i = 0; i < 3; ++i) n[i] -= zp * p0_[i];
    q_ = normalized(cross(normalized(n), p0_));
  } else {
    alpha_ = std::acos(c);
    std::array<double, 3> v = p1;
    for (int i = 0; i < 3; ++i) v[i] -= c * p0_[i];
    q_ = normalized(v);
  }

  sample_t_.resize(kSamples + 1);
  sample_phi_.resize(kSamples + 1);
  double prev_theta = -1.0;
  double offset = 0.0;
  double prev_raw = 0.0;
  for (int k = 0; k <= kSamples; ++k) {
    const double t = alpha_ * k / kSamples;
    const auto p = at(t);
    const double theta = std::acos(std::clamp(p[2], -1.0, 1.0));
    if (k > 0 && !(theta > prev_theta)) {
      throw UsageError("geodesic: the great-circle arc between the endpoints is not a graph over theta");
    }
    prev_theta = theta;
    const double raw = std::atan2(p[1], p[0]);
    if (k == 0) {
      offset = phi0 - raw;
    } else {
      // Continuous unwrapping: steps between samples are far below pi.
      offset += 2 * pi * std::round((prev_raw - raw) / (2 * pi));
    }
    prev_raw = raw;
    sample_t_[k] = t;
    sample_phi_[k] = raw + offset;
  }
  sample_phi_.front() = phi0;
  if (std::abs(sample_phi_.back() - phi1) > 1e-9) {
    throw UsageError("geodesic: phi1 differs from the continuous branch through phi0 by a multiple "
                     "of 2 pi; pass phi1 = " + std::to_string(sample_phi_.back()));
  }
}

std::array<double, 3> GreatCircle::at(double t) const {
  std::array<double, 3> p;
  for (int i = 0; i < 3; ++i) p[i] = std::cos(t) * p0_[i] + std::sin(t) * q_[i];
  return p;
}

std::array<double, 3> GreatCircle::tangent(double t) const {
  std::array<double, 3> d;
  for (int i = 0; i < 3; ++i) d[i] = -std::sin(t) * p0_[i] + std::cos(t) * q_[i];
  return d;
}

double GreatCircle::t_of(double theta) const {
  if (theta <= theta0_) return 0.0;
  if (theta >= theta1_) return alpha_;
  // z = cos(theta) decreases along the arc.
  const double z = std::cos(theta);
  double lo = 0.0;
  double hi = alpha_;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (at(mid)[2] > z) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double GreatCircle::unwrapped(double t) const {
  const auto p = at(t);
  const double raw = std::atan2(p[1], p[0]);
  const double pos = t / alpha_ * kSamples;
  const int k = std::clamp(static_cast<int>(pos), 0, kSamples - 1);
  const double w = pos - k;
  const double ref = (1 - w) * sample_phi_[k] + w * sample_phi_[k + 1];
  return raw + 2 * pi * std::round((ref - raw) / (2 * pi));
}

double GreatCircle::phi(double theta) const {
  if (theta <= theta0_) return sample_phi_.front();
  if (theta >= theta1_) return sample_phi_.back();
  return unwrapped(t_of(theta));
}

double GreatCircle::dphi(double theta) const {
  const double t = t_of(theta);
  const auto p = at(t);
  const auto d = tangent(t);
  const double rho2 = p[0] * p[0] + p[1] * p[1];
  const double dphi_dt = (p[0] * d[1] - p[1] * d[0]) / rho2;
  // theta = acos(z): dtheta/dt = -z' / sin(theta).
  const double dtheta_dt = -d[2] / std::sqrt(rho2);
  return dphi_dt / dtheta_dt;
}

namespace grad_shafranov {
double solovev(double r, double z) {
  const double zeta = (r * r - kR * kR) / (2 * kR);
  return 0.5 * (kB + kC0) * kR * kR * z * z + kC0 * kR * zeta * z * z +
         0.5 * (kA - kC0) * kR * kR * zeta * zeta;
}
}  // namespace grad_shafranov

namespace beltrami {
std::array<double, 3> field(double x, double y, double z) {
  return {std::sin(z) + std::cos(y), std::sin(x) + std::cos(z), std::sin(y) + std::cos(x)};
}

double curl_divergence(std::span<const Jet<double>> h) {
  if (h.size() != 3 || h[0].order < 2 || h[0].dim != 3) {
    throw UsageError("curl_divergence: need three order-2 jets in 3 dimensions");
  }
  // d/dx (dHz/dy - dHy/dz) + d/dy (dHx/dz - dHz/dx) + d/dz (dHy/dx - dHx/dy)
  return (h[2].hess(0, 1) - h[1].hess(0, 2)) + (h[0].hess(1, 2) - h[2].hess(1, 0)) +
         (h[1].hess(2, 0) - h[0].hess(2, 1));
}
}  // namespace beltrami

}  // namespace varconstrain
