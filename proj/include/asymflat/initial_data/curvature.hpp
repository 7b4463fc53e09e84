#pragma once

#include <cmath>

#include "asymflat/core/errors.hpp"
#include "asymflat/core/jet.hpp"
#include "asymflat/core/vec.hpp"
#include "asymflat/initial_data/evaluate.hpp"

namespace asymflat {

struct RicciResult {
  Mat3 ricci;
  double scalar = 0.0;
};

struct ConstraintDensities {
  double mu = 0.0;  // local energy density
  Vec3 J{};         // local momentum density (covector components)
};

/// Christoffel symbols gamma[k][i][j] = Gamma^k_ij and the inverse metric.
struct Connection {
  Mat3 inverse;
  Tensor3 gamma{};
};

inline Mat3 inverse_metric(const Mat3& g) {
  const double det = determinant(g);
  if (!(det > 1e-14) || !std::isfinite(det))
    throw NumericalError("degenerate metric (det g = " + std::to_string(det) +
                         ")");
  return inverse(g, det);
}

inline Connection connection(const MetricJet& m) {
  Connection c;
  c.inverse = inverse_metric(m.g);
  // Lowered symbols Gamma_lij = (g_li,j + g_lj,i - g_ij,l) / 2.
  Tensor3 low{};
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        low[l][i][j] =
            0.5 * (m.dg[l][i][j] + m.dg[l][j][i] - m.dg[i][j][l]);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < 3; ++l) s += c.inverse[k][l] * low[l][i][j];
        c.gamma[k][i][j] = s;
      }
  return c;
}

/// Ricci tensor and scalar curvature from the coordinate Christoffel formula
///   R_ij = Gamma^k_ij,k - Gamma^k_ik,j + Gamma^k_kl Gamma^l_ij
///          - Gamma^k_jl Gamma^l_ik.
inline RicciResult ricci_from_jet(const MetricJet& m) {
  const Connection c = connection(m);
  const Mat3& gi = c.inverse;
  // d_m g^{kl} = -g^{ka} g_ab,m g^{bl}
  Tensor3 dinv{};  // dinv[k][l][m]
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t l = 0; l < 3; ++l)
      for (std::size_t n = 0; n < 3; ++n) {
        double s = 0.0;
        for (std::size_t a = 0; a < 3; ++a)
          for (std::size_t b = 0; b < 3; ++b)
            s -= gi[k][a] * m.dg[a][b][n] * gi[b][l];
        dinv[k][l][n] = s;
      }
  // dgamma[k][i][j][n] = d_n Gamma^k_ij
  Tensor4 dgamma{};
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t n = 0; n < 3; ++n) {
          double s = 0.0;
          for (std::size_t l = 0; l < 3; ++l) {
            const double low =
                0.5 * (m.dg[l][i][j] + m.dg[l][j][i] - m.dg[i][j][l]);
            const double dlow = 0.5 * (m.ddg[l][i][j][n] + m.ddg[l][j][i][n] -
                                       m.ddg[i][j][l][n]);
            s += dinv[k][l][n] * low + gi[k][l] * dlow;
          }
          dgamma[k][i][j][n] = s;
        }
  RicciResult out;
  const Tensor3& G = c.gamma;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        s += dgamma[k][i][j][k] - dgamma[k][i][k][j];
        for (std::size_t l = 0; l < 3; ++l)
          s += G[k][k][l] * G[l][i][j] - G[k][j][l] * G[l][i][k];
      }
      out.ricci[i][j] = out.ricci[j][i] = s;
    }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) out.scalar += gi[i][j] * out.ricci[i][j];
  return out;
}

/// Ricci curvature of g = u^4 delta:
///   R_ij = -2 u^-1 u_,ij + 6 u^-2 u_,i u_,j - 2 (u^-1 Lap u + u^-2 |du|^2) delta_ij
/// and R_g = g^ij R_ij = -8 u^-5 Lap u.
inline RicciResult ricci_conformal(const Jet& u) {
  RicciResult out;
  const double lap = u.hess(0, 0) + u.hess(1, 1) + u.hess(2, 2);
  const double grad2 = u.d[0] * u.d[0] + u.d[1] * u.d[1] + u.d[2] * u.d[2];
  const double iu = 1.0 / u.v;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) {
      double s = -2.0 * iu * u.hess(i, j) + 6.0 * iu * iu * u.d[i] * u.d[j];
      if (i == j) s -= 2.0 * (iu * lap + iu * iu * grad2);
      out.ricci[i][j] = out.ricci[j][i] = s;
    }
  out.scalar = std::pow(iu, 4) * trace(out.ricci);
  return out;
}

enum class RicciRoute { Christoffel, Conformal };

/// Ricci tensor and scalar curvature at x. The conformal route is available
/// for conformally flat families only (CapabilityError otherwise).
inline RicciResult ricci_at(const DataFamily& family, const Vec3& x,
                            RicciRoute route = RicciRoute::Christoffel) {
  if (route == RicciRoute::Conformal) {
    const auto u = conformal_factor_at(family, x);
    if (!u)
      throw CapabilityError("family '" + family_name(family) +
                            "' is not conformally flat");
    return ricci_conformal(*u);
  }
  return ricci_from_jet(metric_at(family, x));
}

/// 2 mu = R_g - |pi|^2_g + (tr_g pi)^2 / 2,   J = div_g pi.
inline ConstraintDensities constraint_residual(const DataFamily& family,
                                               const Vec3& x) {
  const MetricJet m = metric_at(family, x);
  const MomentumJet p = momentum_at(family, x);
  const RicciResult ric = ricci_from_jet(m);
  const Connection c = connection(m);
  const Mat3& gi = c.inverse;
  double pi2 = 0.0, tr = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      tr += gi[i][j] * p.pi[i][j];
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b)
          pi2 += gi[i][a] * gi[j][b] * p.pi[i][j] * p.pi[a][b];
    }
  ConstraintDensities out;
  out.mu = 0.5 * (ric.scalar - pi2 + 0.5 * tr * tr);
  for (std::size_t i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) {
        double cov = p.dpi[i][j][k];
        for (std::size_t l = 0; l < 3; ++l)
          cov -= c.gamma[l][k][i] * p.pi[l][j] + c.gamma[l][k][j] * p.pi[i][l];
        s += gi[j][k] * cov;
      }
    out.J[i] = s;
  }
  return out;
}

}  // namespace asymflat
