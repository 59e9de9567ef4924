#pragma once

#include <array>
#include <cmath>

#include "varconstrain/autodiff.hpp"
#include "varconstrain/errors.hpp"

namespace varconstrain {

/// Value, spatial gradient and spatial Hessian of a quantity at one point.
///
/// `T` is `double` for plain evaluation or `Var` when every coefficient must be
/// differentiable with respect to trainable parameters. The Hessian is stored
/// packed (upper triangle), so it is symmetric by construction. `order` 0 keeps
/// only the value, 1 adds the gradient, 2 adds the Hessian.
template <class T>
struct Jet {
  static constexpr int kMaxDim = 3;

  int dim = 1;
  int order = 0;
  T v{};
  std::array<T, kMaxDim> g{};
  std::array<T, 6> h{};

  static constexpr int packed(int i, int j) {
    return i <= j ? i * (5 - i) / 2 + j : j * (5 - j) / 2 + i;
  }
  const T& hess(int i, int j) const { return h[packed(i, j)]; }
  T& hess(int i, int j) { return h[packed(i, j)]; }
};

namespace jet_detail {

inline void check_shape(int dim, int order) {
  if (dim < 1 || dim > Jet<double>::kMaxDim) throw UsageError("jet: dimension must be 1..3");
  if (order < 0 || order > 2) throw UsageError("jet: order must be 0, 1 or 2");
}

template <class T>
void check_compatible(const Jet<T>& a, const Jet<T>& b) {
  if (a.dim != b.dim || a.order != b.order) {
    throw UsageError("jet: operands differ in dimension or order");
  }
}

}  // namespace jet_detail

template <class T>
Jet<T> constant_jet(T value, int dim, int order) {
  jet_detail::check_shape(dim, order);
  Jet<T> out;
  out.dim = dim;
  out.order = order;
  out.v = value;
  return out;
}

/// The coordinate function x_axis evaluated at `x`: gradient e_axis, Hessian 0.
template <class T>
Jet<T> lift(double x, int axis, int dim, int order) {
  jet_detail::check_shape(dim, order);
  if (axis < 0 || axis >= dim) throw UsageError("jet: lift axis out of range");
  Jet<T> out;
  out.dim = dim;
  out.order = order;
  out.v = T(x);
  out.g[axis] = T(1.0);
  return out;
}

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  jet_detail::check_compatible(a, b);
  Jet<T> out = a;
  out.v = a.v + b.v;
  if (a.order >= 1) {
    for (int i = 0; i < a.dim; ++i) out.g[i] = a.g[i] + b.g[i];
  }
  if (a.order >= 2) {
    for (int i = 0; i < a.dim; ++i)
      for (int j = i; j < a.dim; ++j) out.hess(i, j) = a.hess(i, j) + b.hess(i, j);
  }
  return out;
}

template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  jet_detail::check_compatible(a, b);
  Jet<T> out = a;
  out.v = a.v - b.v;
  if (a.order >= 1) {
    for (int i = 0; i < a.dim; ++i) out.g[i] = a.g[i] - b.g[i];
  }
  if (a.order >= 2) {
    for (int i = 0; i < a.dim; ++i)
      for (int j = i; j < a.dim; ++j) out.hess(i, j) = a.hess(i, j) - b.hess(i, j);
  }
  return out;
}

/// a * b + c * d, each coefficient accumulated into a single node.
template <class T>
Jet<T> mul_add(const Jet<T>& a, const Jet<T>& b, const Jet<T>& c, const Jet<T>& d) {
  jet_detail::check_compatible(a, b);
  jet_detail::check_compatible(a, c);
  jet_detail::check_compatible(a, d);
  Jet<T> out;
  out.dim = a.dim;
  out.order = a.order;
  {
    Sop<T> s;
    s.add(a.v, b.v);
    s.add(c.v, d.v);
    out.v = s.finish();
  }
  if (a.order >= 1) {
    for (int i = 0; i < a.dim; ++i) {
      Sop<T> s;
      s.add(a.g[i], b.v);
      s.add(a.v, b.g[i]);
      s.add(c.g[i], d.v);
      s.add(c.v, d.g[i]);
      out.g[i] = s.finish();
    }
  }
  if (a.order >= 2) {
    for (int i = 0; i < a.dim; ++i) {
      for (int j = i; j < a.dim; ++j) {
        Sop<T> s;
        s.add(a.hess(i, j), b.v);
        s.add(a.g[i], b.g[j]);
        s.add(a.g[j], b.g[i]);
        s.add(a.v, b.hess(i, j));
        s.add(c.hess(i, j), d.v);
        s.add(c.g[i], d.g[j]);
        s.add(c.g[j], d.g[i]);
        s.add(c.v, d.hess(i, j));
        out.hess(i, j) = s.finish();
      }
    }
  }
  return out;
}

template <class T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
  jet_detail::check_compatible(a, b);
  Jet<T> out;
  out.dim = a.dim;
  out.order = a.order;
  {
    Sop<T> s;
    s.add(a.v, b.v);
    out.v = s.finish();
  }
  if (a.order >= 1) {
    for (int i = 0; i < a.dim; ++i) {
      Sop<T> s;
      s.add(a.g[i], b.v);
      s.add(a.v, b.g[i]);
      out.g[i] = s.finish();
    }
  }
  if (a.order >= 2) {
    for (int i = 0; i < a.dim; ++i) {
      for (int j = i; j < a.dim; ++j) {
        Sop<T> s;
        s.add(a.hess(i, j), b.v);
        s.add(a.g[i], b.g[j]);
        s.add(a.g[j], b.g[i]);
        s.add(a.v, b.hess(i, j));
        out.hess(i, j) = s.finish();
      }
    }
  }
  return out;
}

/// scale * x + shift with scalars that do not depend on the spatial point.
template <class T>
Jet<T> scale_shift(const T& scale, const Jet<T>& x, const T& shift) {
  Jet<T> out;
  out.dim = x.dim;
  out.order = x.order;
  {
    Sop<T> s;
    s.add(scale, x.v);
    s.add(shift);
    out.v = s.finish();
  }
  if (x.order >= 1) {
    for (int i = 0; i < x.dim; ++i) {
      Sop<T> s;
      s.add(scale, x.g[i]);
      out.g[i] = s.finish();
    }
  }
  if (x.order >= 2) {
    for (int i = 0; i < x.dim; ++i)
      for (int j = i; j < x.dim; ++j) {
        Sop<T> s;
        s.add(scale, x.hess(i, j));
        out.hess(i, j) = s.finish();
      }
  }
  return out;
}

/// Chain rule for a scalar function with value f0, first derivative f1 and
/// second derivative f2 at x.v:  g = f1 g_x,  H = f1 H_x + f2 g_x g_x^T.
template <class T>
Jet<T> compose(const Jet<T>& x, const T& f0, const T& f1, const T& f2) {
  Jet<T> out;
  out.dim = x.dim;
  out.order = x.order;
  out.v = f0;
  if (x.order >= 1) {
    for (int i = 0; i < x.dim; ++i) out.g[i] = f1 * x.g[i];
  }
  if (x.order >= 2) {
    std::array<T, Jet<T>::kMaxDim> curv{};
    for (int i = 0; i < x.dim; ++i) curv[i] = f2 * x.g[i];
    for (int i = 0; i < x.dim; ++i) {
      for (int j = i; j < x.dim; ++j) {
        Sop<T> s;
        s.add(f1, x.hess(i, j));
        s.add(curv[i], x.g[j]);
        out.hess(i, j) = s.finish();
      }
    }
  }
  return out;
}

template <class T>
Jet<T> tanh(const Jet<T>& x) {
  using std::tanh;
  const T t = tanh(x.v);
  if (x.order == 0) return compose(x, t, T(), T());
  const T d1 = T(1.0) - t * t;
  if (x.order == 1) return compose(x, t, d1, T());
  const T d2 = T(-2.0) * (t * d1);
  return compose(x, t, d1, d2);
}

template <class T>
Jet<T> sqrt(const Jet<T>& x) {
  using std::sqrt;
  if (value_of(x.v) < 0.0) throw DomainError("jet sqrt of negative value");
  if (x.order == 0) return compose(x, T(sqrt(x.v)), T(), T());
  if (value_of(x.v) == 0.0) throw SingularityError("jet sqrt derivative at 0");
  const T s = sqrt(x.v);
  const T d1 = T(0.5) * recip(s);
  if (x.order == 1) return compose(x, s, d1, T());
  const T d2 = T(-0.5) * (d1 * recip(x.v));
  return compose(x, s, d1, d2);
}

template <class T>
Jet<T> recip(const Jet<T>& x) {
  if (value_of(x.v) == 0.0) throw SingularityError("jet division by a value of 0");
  const T r = recip(x.v);
  if (x.order == 0) return compose(x, r, T(), T());
  const T r2 = r * r;
  const T d1 = T(-1.0) * r2;
  if (x.order == 1) return compose(x, r, d1, T());
  const T d2 = T(2.0) * (r2 * r);
  return compose(x, r, d1, d2);
}

template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  jet_detail::check_compatible(a, b);
  return a * recip(b);
}

template <class T>
Jet<T> sin(const Jet<T>& x) {
  using std::cos;
  using std::sin;
  const T s = sin(x.v);
  if (x.order == 0) return compose(x, s, T(), T());
  const T c = cos(x.v);
  return compose(x, s, c, T(-1.0) * s);
}

template <class T>
Jet<T> cos(const Jet<T>& x) {
  using std::cos;
  using std::sin;
  const T c = cos(x.v);
  if (x.order == 0) return compose(x, c, T(), T());
  const T s = sin(x.v);
  return compose(x, c, T(-1.0) * s, T(-1.0) * c);
}

}  // namespace varconstrain
