#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "asymflat/core/errors.hpp"
#include "asymflat/core/parallel.hpp"
#include "asymflat/core/vec.hpp"
#include "asymflat/initial_data/curvature.hpp"
#include "asymflat/initial_data/evaluate.hpp"
#include "asymflat/surface/radial_graph.hpp"

namespace asymflat {

/// Symmetric 2x2 tensor in the (theta, phi) coordinates: {tt, tp, pp}.
using Sym2 = std::array<double, 3>;

/// Per-node differential geometry of a surface in (M, g). Quadrature weights
/// are folded into the area elements: sum(area_g) is the g-area and
/// sum(area_0) the Euclidean area.
struct SurfaceGeometry {
  std::vector<Vec3> position;
  std::vector<Vec3> normal;        // nu_g^i, g-unit, outward
  std::vector<Vec3> normal_flat;   // Euclidean unit outward normal
  std::vector<Sym2> metric;        // induced gamma_ab
  std::vector<Sym2> inverse;       // gamma^ab
  std::vector<Sym2> second_form;   // A_ab
  std::vector<double> H;           // gamma^ab A_ab
  std::vector<double> A2;          // |A|^2
  std::vector<double> ric_nn;      // Ric(nu_g, nu_g)
  std::vector<Mat3> ricci;         // ambient R_ij
  std::vector<double> scalar;      // ambient R_g
  std::vector<Mat3> g;             // ambient g_ij
  std::vector<double> area_g;      // d sigma_g times quadrature weight
  std::vector<double> area_0;      // d sigma_0 times quadrature weight

  std::size_t size() const { return position.size(); }
};

namespace detail {

inline double inner(const Mat3& g, const Vec3& a, const Vec3& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) s += g[i][j] * a[i] * b[j];
  return s;
}

inline Sym2 invert(const Sym2& m, double& det) {
  det = m[0] * m[2] - m[1] * m[1];
  return {m[2] / det, -m[1] / det, m[0] / det};
}

inline double contract(const Sym2& up, const Sym2& low) {
  return up[0] * low[0] + 2.0 * up[1] * low[1] + up[2] * low[2];
}

}  // namespace detail

/// Fundamental forms, normal, curvature and area elements at every node.
/// The embedding's theta/phi partials come from spectral differentiation of
/// psi; ambient quantities come from the analytic metric jet.
inline SurfaceGeometry compute_geometry(const RadialGraphSurface& s,
                                        const DataFamily& family) {
  const SphereGrid& grid = *s.grid;
  const SpectralField rho = synthesize(grid, s.psi);
  const std::size_t n = grid.size();
  SurfaceGeometry out;
  out.position.resize(n);
  out.normal.resize(n);
  out.normal_flat.resize(n);
  out.metric.resize(n);
  out.inverse.resize(n);
  out.second_form.resize(n);
  out.H.resize(n);
  out.A2.resize(n);
  out.ric_nn.resize(n);
  out.ricci.resize(n);
  out.scalar.resize(n);
  out.g.resize(n);
  out.area_g.resize(n);
  out.area_0.resize(n);

  parallel_for(n, [&](std::size_t k) {
    const std::size_t i = k / static_cast<std::size_t>(grid.n_phi);
    const std::size_t j = k % static_cast<std::size_t>(grid.n_phi);
    const double ct = grid.cos_theta[i], st = grid.sin_theta[i];
    const double cp = grid.cos_mphi[1][j], sp = grid.sin_mphi[1][j];
    const Vec3 w{st * cp, st * sp, ct};
    const Vec3 w_t{ct * cp, ct * sp, -st};
    const Vec3 w_p{-st * sp, st * cp, 0.0};
    const Vec3 w_tp{-ct * sp, ct * cp, 0.0};
    const Vec3 w_pp{-st * cp, -st * sp, 0.0};
    const double r = s.R + rho.f[k];
    if (!(r > 0.0))
      throw NumericalError("radial graph R + psi is not positive at node " +
                           std::to_string(k));
    const double r_t = rho.f_t[k], r_p = rho.f_p[k];
    const Vec3 X = s.p + r * w;
    const Vec3 Xt = r_t * w + r * w_t;
    const Vec3 Xp = r_p * w + r * w_p;
    const Vec3 Xtt = rho.f_tt[k] * w + 2.0 * r_t * w_t - r * w;
    const Vec3 Xtp = rho.f_tp[k] * w + r_t * w_p + r_p * w_t + r * w_tp;
    const Vec3 Xpp = rho.f_pp[k] * w + 2.0 * r_p * w_p + r * w_pp;

    const MetricJet m = metric_at(family, X);
    const Connection c = connection(m);
    const Mat3& gi = c.inverse;

    const Sym2 gam{detail::inner(m.g, Xt, Xt), detail::inner(m.g, Xt, Xp),
                   detail::inner(m.g, Xp, Xp)};
    double det = 0.0;
    const Sym2 gam_inv = detail::invert(gam, det);
    if (!(det > 0.0) || !std::isfinite(det))
      throw NumericalError("degenerate induced metric at node " + std::to_string(k));

    // Normal covector from the cross product, raised and g-normalized.
    const Vec3 ncov = cross(Xt, Xp);
    const Vec3 nup = gi * ncov;
    const double nn = dot(ncov, nup);
    const double sgn = dot(ncov, w) >= 0.0 ? 1.0 : -1.0;
    const Vec3 nu = (sgn / std::sqrt(nn)) * nup;
    const Vec3 nu_low = (sgn / std::sqrt(nn)) * ncov;

    auto second = [&](const Vec3& Xab, const Vec3& Xa, const Vec3& Xb) {
      double v = dot(nu_low, Xab);
      for (std::size_t q = 0; q < 3; ++q) {
        double gq = 0.0;
        for (std::size_t a = 0; a < 3; ++a)
          for (std::size_t b = 0; b < 3; ++b) gq += c.gamma[q][a][b] * Xa[a] * Xb[b];
        v += nu_low[q] * gq;
      }
      return -v;
    };
    const Sym2 A{second(Xtt, Xt, Xt), second(Xtp, Xt, Xp), second(Xpp, Xp, Xp)};
    const double H = detail::contract(gam_inv, A);
    // |A|^2 = gamma^ac gamma^bd A_ab A_cd
    const double a00 = gam_inv[0] * A[0] + gam_inv[1] * A[1];
    const double a01 = gam_inv[0] * A[1] + gam_inv[1] * A[2];
    const double a10 = gam_inv[1] * A[0] + gam_inv[2] * A[1];
    const double a11 = gam_inv[1] * A[1] + gam_inv[2] * A[2];
    const double A2 = a00 * a00 + a01 * a10 + a10 * a01 + a11 * a11;

    const RicciResult ric = ricci_from_jet(m);
    const double rnn = detail::inner(ric.ricci, nu, nu);

    out.position[k] = X;
    out.normal[k] = nu;
    out.normal_flat[k] = (sgn / norm(ncov)) * ncov;
    out.metric[k] = gam;
    out.inverse[k] = gam_inv;
    out.second_form[k] = A;
    out.H[k] = H;
    out.A2[k] = A2;
    out.ric_nn[k] = rnn;
    out.ricci[k] = ric.ricci;
    out.scalar[k] = ric.scalar;
    out.g[k] = m.g;
    out.area_g[k] = std::sqrt(det) / st * grid.weights[k];
    out.area_0[k] = norm(ncov) / st * grid.weights[k];
  });
  return out;
}

/// Linear-in-h mean curvature of the coordinate sphere S_R(p) at p + R omega:
///   2/R + h_ij,k w^i w^j w^k / 2 + 2 h_ij w^i w^j / R - h_ij,i w^j
///       + h_ii,j w^j / 2 - h_ii / R,
/// with h = g - delta and omega the unit direction from p.
inline double mean_curvature_expansion(const DataFamily& family, const Vec3& p,
                                       double R, const Vec3& omega) {
  const Vec3 w = omega / norm(omega);
  const MetricJet m = metric_at(family, p + R * w);
  double t1 = 0, t2 = 0, t3 = 0, t4 = 0, t5 = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double hii = m.g[i][i] - 1.0;
    t5 += hii;
    for (std::size_t j = 0; j < 3; ++j) {
      const double hij = m.g[i][j] - (i == j ? 1.0 : 0.0);
      t2 += hij * w[i] * w[j];
      t3 += m.dg[i][j][i] * w[j];
      t4 += m.dg[i][i][j] * w[j];
      for (std::size_t k = 0; k < 3; ++k) t1 += m.dg[i][j][k] * w[i] * w[j] * w[k];
    }
  }
  return 2.0 / R + 0.5 * t1 + 2.0 * t2 / R - t3 + 0.5 * t4 - t5 / R;
}

struct AreaCentroid {
  double area_g = 0.0;
  double area_0 = 0.0;
  Vec3 centroid{};  // Euclidean-measure centroid
};

inline AreaCentroid area_and_centroid(const SurfaceGeometry& geo) {
  AreaCentroid out;
  out.area_g = pairwise_sum(geo.area_g);
  out.area_0 = pairwise_sum(geo.area_0);
  std::vector<double> t(geo.size());
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = geo.position[k][c] * geo.area_0[k];
    out.centroid[c] = pairwise_sum(t) / out.area_0;
  }
  return out;
}

/// Quadrature of Ric(nu_g, nu_g) against d sigma_g.
inline double ricci_flux(const SurfaceGeometry& geo) {
  std::vector<double> t(geo.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = geo.ric_nn[k] * geo.area_g[k];
  return pairwise_sum(t);
}

/// Area-weighted mean of a node field with respect to d sigma_g.
inline double surface_mean(const SurfaceGeometry& geo, const std::vector<double>& f) {
  std::vector<double> t(geo.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = f[k] * geo.area_g[k];
  return pairwise_sum(t) / pairwise_sum(geo.area_g);
}

}  // namespace asymflat
