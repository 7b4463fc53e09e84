#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "asymflat/core/errors.hpp"
#include "asymflat/core/jet.hpp"
#include "asymflat/core/vec.hpp"
#include "asymflat/initial_data/family.hpp"

namespace asymflat {

using Tensor3 = std::array<std::array<std::array<double, 3>, 3>, 3>;
using Tensor4 = std::array<Tensor3, 3>;

/// g_ij, g_ij,k and g_ij,kl at a chart point.
struct MetricJet {
  Mat3 g;
  Tensor3 dg{};   // dg[i][j][k] = g_ij,k
  Tensor4 ddg{};  // ddg[i][j][k][l] = g_ij,kl
};

/// pi_ij and pi_ij,k at a chart point.
struct MomentumJet {
  Mat3 pi;
  Tensor3 dpi{};  // dpi[i][j][k] = pi_ij,k
};

namespace detail {

/// Symmetric tensor field as six component jets (00, 01, 02, 11, 12, 22).
using SymJet = std::array<Jet, 6>;

inline SymJet isotropic(const Jet& phi) {
  SymJet s;
  s[0] = s[3] = s[5] = phi;
  return s;
}

inline MetricJet to_metric_jet(const SymJet& s) {
  MetricJet out;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const Jet& c = s[sym_index(i, j)];
      out.g[i][j] = c.v;
      for (std::size_t k = 0; k < 3; ++k) {
        out.dg[i][j][k] = c.d[k];
        for (std::size_t l = 0; l < 3; ++l) out.ddg[i][j][k][l] = c.hess(k, l);
      }
    }
  }
  return out;
}

inline Jet radius(const Vec3Jet& x) { return sqrt(dot(x, x)); }

/// C^2 quintic switch: 0 for r <= R0, 1 for r >= 2 R0.
inline Jet cutoff(const Jet& r, double R0) {
  const double s0 = (r.v - R0) / R0;
  if (s0 <= 0.0) return Jet(0.0);
  if (s0 >= 1.0) return Jet(1.0);
  const Jet s = (r - R0) / R0;
  const Jet s3 = s * s * s;
  return s3 * (10.0 - 15.0 * s + 6.0 * s * s);
}

// Fixed shape constants for the named perturbation profiles.
inline constexpr Mat3 kProfileQuadrupole{
    {{{1.0, 0.3, 0.0}, {0.3, -0.4, 0.2}, {0.0, 0.2, -0.6}}}};
inline constexpr double kProfileMu = 0.5;
inline constexpr Vec3 kProfileDipole{1.0, -1.0, 2.0};
inline constexpr Vec3 kProfileKappa{0.2, -0.1, 0.3};
inline constexpr Vec3 kProfileSpin{0.5, 0.25, -1.0};
inline constexpr Vec3 kProfileOddDirection{0.0, 0.0, 1.0};

inline Jet quadratic_form(const Mat3& Q, const Vec3Jet& x) {
  Jet s(0.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (Q[i][j] != 0.0) s += Q[i][j] * (x[i] * x[j]);
  return s;
}

inline Jet schwarzschild_u(double mass, const Vec3& center, const Vec3Jet& x) {
  const Vec3Jet y{x[0] - center[0], x[1] - center[1], x[2] - center[2]};
  return 1.0 + mass / (2.0 * radius(y));
}

inline Jet harmonic_u(const HarmonicAsymptotics& h, const Vec3Jet& x) {
  const Jet r = radius(x);
  const Jet inv_r = 1.0 / r;
  const Jet inv_r3 = inv_r * inv_r * inv_r;
  return 1.0 + h.monopole * inv_r + dot(x, h.dipole) * inv_r3 +
         quadratic_form(h.quadrupole, x) * inv_r3 * inv_r * inv_r;
}

/// X_i = kappa_i / r + D_ij x^j / r^3 as component jets.
inline std::array<Jet, 3> shift_field(const Vec3& kappa, const Mat3& D,
                                      const Vec3Jet& x) {
  const Jet r = radius(x);
  const Jet inv_r = 1.0 / r;
  const Jet inv_r3 = inv_r * inv_r * inv_r;
  std::array<Jet, 3> X;
  for (std::size_t i = 0; i < 3; ++i) {
    Jet dip(0.0);
    for (std::size_t j = 0; j < 3; ++j)
      if (D[i][j] != 0.0) dip += D[i][j] * x[j];
    X[i] = kappa[i] * inv_r + dip * inv_r3;
  }
  return X;
}

/// u^2 (X_i,j + X_j,i - div X delta_ij) to first order.
inline std::array<std::array<Jet1, 3>, 3> conformal_killing_momentum(
    const Jet& u, const std::array<Jet, 3>& X) {
  const Jet1 u2(u * u);
  Jet1 div(0.0);
  for (std::size_t i = 0; i < 3; ++i) div = div + Jet1::partial(X[i], i);
  std::array<std::array<Jet1, 3>, 3> pi;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i; j < 3; ++j) {
      Jet1 s = Jet1::partial(X[i], j) + Jet1::partial(X[j], i);
      if (i == j) s = s - div;
      pi[i][j] = u2 * s;
      pi[j][i] = pi[i][j];
    }
  }
  return pi;
}

inline MomentumJet to_momentum_jet(
    const std::array<std::array<Jet1, 3>, 3>& pi) {
  MomentumJet out;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      out.pi[i][j] = pi[i][j].v;
      for (std::size_t k = 0; k < 3; ++k) out.dpi[i][j][k] = pi[i][j].d[k];
    }
  return out;
}

inline SymJet kerr_metric(const KerrSpatial& k, const Vec3Jet& x) {
  const double a = k.spin;
  const double a2 = a * a;
  const Jet rho2 = dot(x, x);
  const Jet w = rho2 - a2;
  const Jet r2 = 0.5 * (w + sqrt(w * w + 4.0 * a2 * (x[2] * x[2])));
  const Jet r = sqrt(r2);
  const Jet denom = 1.0 / (r * (2.0 * r2 - w));
  std::array<Jet, 3> dr;
  for (std::size_t i = 0; i < 3; ++i) dr[i] = r2 * x[i] * denom;
  dr[2] += a2 * x[2] * denom;
  const Jet sigma = r2 + a2 * (x[2] * x[2]) / r2;
  const Jet delta = r2 - 2.0 * k.mass * r + a2;
  const Jet ra = r2 + a2;
  const Jet F = 2.0 * k.mass * r * sigma / (delta * ra);
  const Jet G = 2.0 * k.mass * r * a2 / (sigma * ra * ra);
  const std::array<Jet, 3> rot{-x[1], x[0], Jet(0.0)};
  SymJet s;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) {
      Jet c = F * (dr[i] * dr[j]);
      if (a2 != 0.0 && i < 2 && j < 2) c += G * (rot[i] * rot[j]);
      if (i == j) c += 1.0;
      s[sym_index(i, j)] = c;
    }
  return s;
}

/// h-profile of a named perturbation (metric part), without eps.
inline SymJet profile_metric(Profile p, const Vec3Jet& x, double q,
                             double R0) {
  const Jet r = radius(x);
  const Jet chi = cutoff(r, R0);
  if (chi.v == 0.0 && chi.d == std::array<double, 3>{}) return SymJet{};
  const Jet inv_r = 1.0 / r;
  Jet phi;
  switch (p) {
    case Profile::Quadrupole:
      phi = quadratic_form(kProfileQuadrupole, x) * square(inv_r * inv_r);
      break;
    case Profile::Anisotropic:
      phi = quadratic_form(kProfileQuadrupole, x) * inv_r * inv_r * inv_r;
      break;
    case Profile::MassDipole:
      phi = 2.0 * kProfileMu * inv_r +
            2.0 * kProfileMu * dot(x, kProfileDipole) * inv_r * inv_r * inv_r;
      break;
    case Profile::OddPower:
      phi = dot(x, kProfileOddDirection) * pow(r, -1.0 - q);
      break;
  }
  return isotropic(chi * phi);
}

/// pi-profile of a named perturbation, without eps. Zero except MassDipole.
inline std::array<std::array<Jet1, 3>, 3> profile_momentum(Profile p,
                                                            const Vec3Jet& x,
                                                            double R0) {
  std::array<std::array<Jet1, 3>, 3> zero{};
  if (p != Profile::MassDipole) return zero;
  const Jet chi = cutoff(radius(x), R0);
  if (chi.v == 0.0 && chi.d == std::array<double, 3>{}) return zero;
  Mat3 D;  // X = w x x / r^3  <=>  D_ij = eps_ikj w_k
  const Vec3& w = kProfileSpin;
  D[0] = {0.0, -w[2], w[1]};
  D[1] = {w[2], 0.0, -w[0]};
  D[2] = {-w[1], w[0], 0.0};
  auto X = shift_field(kProfileKappa, D, x);
  for (auto& c : X) c = chi * c;
  return conformal_killing_momentum(Jet(1.0), X);
}

inline MetricJet add_scaled(MetricJet a, double s, const MetricJet& b) {
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      a.g[i][j] += s * b.g[i][j];
      for (std::size_t k = 0; k < 3; ++k) {
        a.dg[i][j][k] += s * b.dg[i][j][k];
        for (std::size_t l = 0; l < 3; ++l)
          a.ddg[i][j][k][l] += s * b.ddg[i][j][k][l];
      }
    }
  return a;
}

inline MetricJet rotate(const MetricJet& in, const Mat3& O) {
  // Components in the y-chart: T'_{i j k l} = O_ia O_jb O_kc O_ld T_abcd.
  MetricJet out;
  Mat3 g{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b)
          g[i][j] += O[i][a] * O[j][b] * in.g[a][b];
  out.g = g;
  Tensor3 t1{};  // rotate the derivative index first, then the pair
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t c = 0; c < 3; ++c)
          t1[a][b][k] += O[k][c] * in.dg[a][b][c];
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) {
        double s = 0.0;
        for (std::size_t a = 0; a < 3; ++a)
          for (std::size_t b = 0; b < 3; ++b)
            s += O[i][a] * O[j][b] * t1[a][b][k];
        out.dg[i][j][k] = s;
      }
  Tensor4 t2{};
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = k; l < 3; ++l) {
          double s = 0.0;
          for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t d = 0; d < 3; ++d)
              s += O[k][c] * O[l][d] * in.ddg[a][b][c][d];
          t2[a][b][k][l] = s;
          t2[a][b][l][k] = s;
        }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) {
          double s = 0.0;
          for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b)
              s += O[i][a] * O[j][b] * t2[a][b][k][l];
          out.ddg[i][j][k][l] = s;
          out.ddg[j][i][k][l] = s;
        }
  // Restore exact symmetry of the value and first-derivative pairs.
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      out.g[j][i] = out.g[i][j];
      for (std::size_t k = 0; k < 3; ++k) out.dg[j][i][k] = out.dg[i][j][k];
    }
  return out;
}

inline MomentumJet rotate(const MomentumJet& in, const Mat3& O) {
  MomentumJet out{};
  Mat3 p{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) s += O[i][a] * O[j][b] * in.pi[a][b];
      p[i][j] = p[j][i] = s;
      for (std::size_t k = 0; k < 3; ++k) {
        double t = 0.0;
        for (std::size_t a = 0; a < 3; ++a)
          for (std::size_t b = 0; b < 3; ++b)
            for (std::size_t c = 0; c < 3; ++c)
              t += O[i][a] * O[j][b] * O[k][c] * in.dpi[a][b][c];
        out.dpi[i][j][k] = out.dpi[j][i][k] = t;
      }
    }
  out.pi = p;
  return out;
}

inline Vec3 pull_back_point(const RigidMotion& rm, const Vec3& y) {
  return transpose(rm.rotation) * (y - rm.shift);
}

}  // namespace detail

/// Throws DomainError unless x lies in the chart region of `family`.
inline void check_chart(const DataFamily& family, const Vec3& x) {
  struct {
    const DataFamily& fam;
    const Vec3& x;
    void outside(double r) const {
      if (!(r > fam.R0))
        throw DomainError("point at |x| = " + std::to_string(r) +
                          " is inside the chart radius R0 = " +
                          std::to_string(fam.R0));
    }
    void operator()(const Flat&) const {}
    void operator()(const SchwarzschildIsotropic& s) const {
      if (!(norm(x - s.center) > 0.0))
        throw DomainError("evaluation at the Schwarzschild center");
    }
    void operator()(const HarmonicAsymptotics&) const { outside(norm(x)); }
    void operator()(const KerrSpatial&) const { outside(norm(x)); }
    void operator()(const RTViolating&) const { outside(norm(x)); }
    void operator()(const Perturbed& p) const {
      check_chart(*p.base, x);
      if (!(norm(x) > 0.0)) throw DomainError("evaluation at the origin");
    }
    void operator()(const RigidMotion& rm) const {
      check_chart(*rm.base, detail::pull_back_point(rm, x));
    }
  } visitor{family, x};
  std::visit(visitor, family.kind);
}

/// Exact metric with first and second partials at x.
inline MetricJet metric_at(const DataFamily& family, const Vec3& x) {
  check_chart(family, x);
  const Vec3Jet X = coordinate_jets(x);
  struct {
    const DataFamily& fam;
    const Vec3& x;
    const Vec3Jet& X;
    MetricJet operator()(const Flat&) const {
      return detail::to_metric_jet(detail::isotropic(Jet(1.0)));
    }
    MetricJet operator()(const SchwarzschildIsotropic& s) const {
      const Jet u = detail::schwarzschild_u(s.mass, s.center, X);
      return detail::to_metric_jet(detail::isotropic(square(square(u))));
    }
    MetricJet operator()(const HarmonicAsymptotics& h) const {
      const Jet u = detail::harmonic_u(h, X);
      if (!(u.v > 0.0)) throw DomainError("conformal factor is not positive");
      return detail::to_metric_jet(detail::isotropic(square(square(u))));
    }
    MetricJet operator()(const KerrSpatial& k) const {
      return detail::to_metric_jet(detail::kerr_metric(k, X));
    }
    MetricJet operator()(const RTViolating& v) const {
      const Jet r = detail::radius(X);
      const Jet u = detail::schwarzschild_u(v.mass, Vec3{}, X);
      const Jet odd = v.amp * detail::cutoff(r, fam.R0) * dot(X, v.dir) *
                      pow(r, -1.0 - fam.q);
      return detail::to_metric_jet(detail::isotropic(square(square(u)) + odd));
    }
    MetricJet operator()(const Perturbed& p) const {
      MetricJet base = metric_at(*p.base, x);
      if (p.eps == 0.0) return base;
      const MetricJet prof = detail::to_metric_jet(
          detail::profile_metric(p.profile, X, fam.q, fam.R0));
      return detail::add_scaled(base, p.eps, prof);
    }
    MetricJet operator()(const RigidMotion& rm) const {
      return detail::rotate(
          metric_at(*rm.base, detail::pull_back_point(rm, x)), rm.rotation);
    }
  } visitor{family, x, X};
  return std::visit(visitor, family.kind);
}

/// Whether momentum_at is defined for this family.
inline bool provides_momentum(const DataFamily& family) {
  if (std::holds_alternative<KerrSpatial>(family.kind)) return false;
  if (const auto* p = std::get_if<Perturbed>(&family.kind))
    return provides_momentum(*p->base);
  if (const auto* r = std::get_if<RigidMotion>(&family.kind))
    return provides_momentum(*r->base);
  return true;
}

/// Momentum tensor and its first partials at x.
inline MomentumJet momentum_at(const DataFamily& family, const Vec3& x) {
  if (!provides_momentum(family))
    throw CapabilityError("family '" + family_name(family) +
                          "' does not provide a momentum tensor");
  check_chart(family, x);
  const Vec3Jet X = coordinate_jets(x);
  struct {
    const DataFamily& fam;
    const Vec3& x;
    const Vec3Jet& X;
    MomentumJet operator()(const Flat&) const { return {}; }
    MomentumJet operator()(const SchwarzschildIsotropic&) const { return {}; }
    MomentumJet operator()(const HarmonicAsymptotics& h) const {
      const Jet u = detail::harmonic_u(h, X);
      const auto Xf = detail::shift_field(h.shift_monopole, h.shift_dipole, X);
      return detail::to_momentum_jet(detail::conformal_killing_momentum(u, Xf));
    }
    MomentumJet operator()(const KerrSpatial&) const {
      throw CapabilityError("Kerr momentum is not provided");
    }
    MomentumJet operator()(const RTViolating&) const { return {}; }
    MomentumJet operator()(const Perturbed& p) const {
      MomentumJet base = momentum_at(*p.base, x);
      if (p.eps == 0.0) return base;
      const MomentumJet prof = detail::to_momentum_jet(
          detail::profile_momentum(p.profile, X, fam.R0));
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          base.pi[i][j] += p.eps * prof.pi[i][j];
          for (std::size_t k = 0; k < 3; ++k)
            base.dpi[i][j][k] += p.eps * prof.dpi[i][j][k];
        }
      return base;
    }
    MomentumJet operator()(const RigidMotion& rm) const {
      return detail::rotate(
          momentum_at(*rm.base, detail::pull_back_point(rm, x)), rm.rotation);
    }
  } visitor{family, x, X};
  return std::visit(visitor, family.kind);
}

/// Conformal factor u with g = u^4 delta, for conformally flat families.
inline std::optional<Jet> conformal_factor_at(const DataFamily& family,
                                              const Vec3& x) {
  check_chart(family, x);
  const Vec3Jet X = coordinate_jets(x);
  if (std::holds_alternative<Flat>(family.kind)) return Jet(1.0);
  if (const auto* s = std::get_if<SchwarzschildIsotropic>(&family.kind))
    return detail::schwarzschild_u(s->mass, s->center, X);
  if (const auto* h = std::get_if<HarmonicAsymptotics>(&family.kind))
    return detail::harmonic_u(*h, X);
  if (const auto* p = std::get_if<Perturbed>(&family.kind)) {
    if (p->eps == 0.0) return conformal_factor_at(*p->base, x);
    return std::nullopt;
  }
  if (const auto* rm = std::get_if<RigidMotion>(&family.kind)) {
    auto u = conformal_factor_at(*rm->base, detail::pull_back_point(*rm, x));
    if (!u) return std::nullopt;
    const Mat3& O = rm->rotation;
    Jet out(u->v);
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t c = 0; c < 3; ++c) out.d[k] += O[k][c] * u->d[c];
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t l = k; l < 3; ++l) {
        double s = 0.0;
        for (std::size_t a = 0; a < 3; ++a)
          for (std::size_t b = 0; b < 3; ++b)
            s += O[k][a] * O[l][b] * u->hess(a, b);
        out.h[sym_index(k, l)] = s;
      }
    return out;
  }
  return std::nullopt;
}

}  // namespace asymflat
