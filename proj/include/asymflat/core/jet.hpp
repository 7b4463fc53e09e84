#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "asymflat/core/vec.hpp"

namespace asymflat {

/// Index into packed symmetric 3x3 storage (00, 01, 02, 11, 12, 22).
constexpr std::size_t sym_index(std::size_t k, std::size_t l) {
  constexpr std::array<std::array<std::size_t, 3>, 3> table{
      {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}}};
  return table[k][l];
}

/// Second-order forward-mode jet of a scalar field on R^3: value, gradient
/// and Hessian with respect to the chart coordinates. Arithmetic applies the
/// exact chain and product rules, so every derivative is analytic. The
/// Hessian is stored packed, which makes its (k,l) symmetry bitwise exact.
struct Jet {
  double v = 0.0;
  std::array<double, 3> d{};
  std::array<double, 6> h{};

  constexpr Jet() = default;
  constexpr Jet(double value) : v(value) {}  // NOLINT: constants promote

  /// The coordinate function x^k evaluated at `value`.
  static constexpr Jet variable(double value, std::size_t k) {
    Jet j(value);
    j.d[k] = 1.0;
    return j;
  }

  constexpr double hess(std::size_t k, std::size_t l) const {
    return h[sym_index(k, l)];
  }

  constexpr Jet& operator+=(const Jet& o) {
    v += o.v;
    for (std::size_t k = 0; k < 3; ++k) d[k] += o.d[k];
    for (std::size_t k = 0; k < 6; ++k) h[k] += o.h[k];
    return *this;
  }
  constexpr Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (std::size_t k = 0; k < 3; ++k) d[k] -= o.d[k];
    for (std::size_t k = 0; k < 6; ++k) h[k] -= o.h[k];
    return *this;
  }
  constexpr Jet& operator*=(double s) {
    v *= s;
    for (auto& x : d) x *= s;
    for (auto& x : h) x *= s;
    return *this;
  }
};

constexpr Jet operator+(Jet a, const Jet& b) { return a += b; }
constexpr Jet operator-(Jet a, const Jet& b) { return a -= b; }
constexpr Jet operator-(Jet a) { return a *= -1.0; }
constexpr Jet operator*(Jet a, double s) { return a *= s; }
constexpr Jet operator*(double s, Jet a) { return a *= s; }
constexpr Jet operator+(Jet a, double s) {
  a.v += s;
  return a;
}
constexpr Jet operator+(double s, Jet a) { return a + s; }
constexpr Jet operator-(Jet a, double s) {
  a.v -= s;
  return a;
}
constexpr Jet operator-(double s, const Jet& a) { return -a + s; }

constexpr Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  for (std::size_t k = 0; k < 3; ++k) r.d[k] = a.d[k] * b.v + a.v * b.d[k];
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t l = k; l < 3; ++l) {
      const std::size_t s = sym_index(k, l);
      r.h[s] = a.h[s] * b.v + a.d[k] * b.d[l] + a.d[l] * b.d[k] + a.v * b.h[s];
    }
  }
  return r;
}

/// Composition f(a) given f, f' and f'' at a.v.
constexpr Jet compose(const Jet& a, double f, double df, double ddf) {
  Jet r;
  r.v = f;
  for (std::size_t k = 0; k < 3; ++k) r.d[k] = df * a.d[k];
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t l = k; l < 3; ++l) {
      const std::size_t s = sym_index(k, l);
      r.h[s] = df * a.h[s] + ddf * a.d[k] * a.d[l];
    }
  }
  return r;
}

inline Jet reciprocal(const Jet& a) {
  const double inv = 1.0 / a.v;
  return compose(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
inline Jet operator/(double s, const Jet& a) { return s * reciprocal(a); }

inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet pow(const Jet& a, double p) {
  const double f = std::pow(a.v, p);
  return compose(a, f, p * f / a.v, p * (p - 1.0) * f / (a.v * a.v));
}
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return compose(a, e, e, e);
}
inline Jet log(const Jet& a) {
  return compose(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}
constexpr Jet square(const Jet& a) { return a * a; }

/// Jet triple for the chart coordinates at `x`.
using Vec3Jet = std::array<Jet, 3>;

constexpr Vec3Jet coordinate_jets(const Vec3& x) {
  return {Jet::variable(x[0], 0), Jet::variable(x[1], 1),
          Jet::variable(x[2], 2)};
}
constexpr Jet dot(const Vec3Jet& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
constexpr Jet dot(const Vec3Jet& a, const Vec3Jet& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/// First-order jet: value and gradient only.
struct Jet1 {
  double v = 0.0;
  std::array<double, 3> d{};

  constexpr Jet1() = default;
  constexpr Jet1(double value) : v(value) {}  // NOLINT
  constexpr explicit Jet1(const Jet& j) : v(j.v), d(j.d) {}

  /// Partial derivative of a second-order jet along x^k, kept to first order.
  static constexpr Jet1 partial(const Jet& j, std::size_t k) {
    Jet1 r(j.d[k]);
    for (std::size_t l = 0; l < 3; ++l) r.d[l] = j.hess(k, l);
    return r;
  }
};

constexpr Jet1 operator+(Jet1 a, const Jet1& b) {
  a.v += b.v;
  for (std::size_t k = 0; k < 3; ++k) a.d[k] += b.d[k];
  return a;
}
constexpr Jet1 operator-(Jet1 a, const Jet1& b) {
  a.v -= b.v;
  for (std::size_t k = 0; k < 3; ++k) a.d[k] -= b.d[k];
  return a;
}
constexpr Jet1 operator*(double s, Jet1 a) {
  a.v *= s;
  for (auto& x : a.d) x *= s;
  return a;
}
constexpr Jet1 operator*(const Jet1& a, const Jet1& b) {
  Jet1 r(a.v * b.v);
  for (std::size_t k = 0; k < 3; ++k) r.d[k] = a.d[k] * b.v + a.v * b.d[k];
  return r;
}

}  // namespace asymflat
