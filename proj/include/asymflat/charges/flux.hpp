#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "asymflat/charges/killing.hpp"
#include "asymflat/core/parallel.hpp"
#include "asymflat/core/vec.hpp"
#include "asymflat/initial_data/evaluate.hpp"
#include "asymflat/spectral/grid.hpp"
#include "asymflat/surface/geometry.hpp"
#include "asymflat/surface/radial_graph.hpp"

namespace asymflat {

/// Flux integrals over the coordinate sphere |x| = r. Moments are the raw
/// integrals with the 1/(16 pi) or 1/(8 pi) prefactor applied but not yet
/// divided by the mass.
struct SphereFluxes {
  double r = 0.0;
  double mass = 0.0;       // m(r)
  Vec3 momentum{};         // P(r)
  Vec3 center_moment{};    // m C(r)
  Vec3 angular_moment{};   // m J(r)
  bool has_momentum = false;
  bool has_curvature = false;
  double intrinsic_mass = 0.0;       // m_I(r), exact normal and area
  double intrinsic_mass_flat = 0.0;  // with x/r and d sigma_0
  Vec3 intrinsic_moment{};           // m C_I(r)
  Vec3 intrinsic_moment_flat{};
};

/// Einstein-tensor fluxes of a closed surface against the dilation and the
/// conformal fields Y_(l), with the 1/(16 pi) prefactor.
struct IntrinsicMoments {
  double mass = 0.0;
  Vec3 center{};
  double mass_flat = 0.0;
  Vec3 center_flat{};
};

inline IntrinsicMoments intrinsic_moments(const SurfaceGeometry& geo) {
  const std::size_t n = geo.size();
  std::vector<double> tm(n), tmf(n);
  std::array<std::vector<double>, 3> tc, tcf;
  for (auto& v : tc) v.resize(n);
  for (auto& v : tcf) v.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    Mat3 G;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        G[i][j] = geo.ricci[k][i][j] - 0.5 * geo.scalar[k] * geo.g[k][i][j];
    const Vec3& x = geo.position[k];
    const Vec3 Gn = G * geo.normal[k];
    const Vec3 Gnf = G * geo.normal_flat[k];
    tm[k] = dot(dilation()(x), Gn) * geo.area_g[k];
    tmf[k] = dot(dilation()(x), Gnf) * geo.area_0[k];
    for (int l = 0; l < 3; ++l) {
      const Vec3 Y = boost_conformal(l)(x);
      tc[static_cast<std::size_t>(l)][k] = dot(Y, Gn) * geo.area_g[k];
      tcf[static_cast<std::size_t>(l)][k] = dot(Y, Gnf) * geo.area_0[k];
    }
  }
  const double f = 1.0 / (16.0 * std::numbers::pi);
  IntrinsicMoments out;
  out.mass = f * pairwise_sum(tm);
  out.mass_flat = f * pairwise_sum(tmf);
  for (std::size_t l = 0; l < 3; ++l) {
    out.center[l] = f * pairwise_sum(tc[l]);
    out.center_flat[l] = f * pairwise_sum(tcf[l]);
  }
  return out;
}

inline SphereFluxes sphere_fluxes(const DataFamily& family, const GridPtr& grid, double r,
                                  bool want_momentum, bool want_curvature) {
  const SphereGrid& G = *grid;
  const std::size_t n = G.size();
  SphereFluxes out;
  out.r = r;
  out.has_momentum = want_momentum && provides_momentum(family);
  const double area = r * r;
  std::vector<double> tm(n);
  std::array<std::vector<double>, 3> tp, tc, tj;
  for (std::size_t l = 0; l < 3; ++l) {
    tp[l].resize(n);
    tc[l].resize(n);
    tj[l].resize(n);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3& w = G.nodes[k];
    const Vec3 x = r * w;
    const double dA = area * G.weights[k];
    const MetricJet m = metric_at(family, x);
    // flux = sum_ij (g_ij,i - g_ii,j) w^j. The flat part of the second center
    // term integrates to zero exactly, so only h = g - delta enters it; this
    // keeps the summands O(r m).
    double flux = 0.0, trace = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      trace += m.g[i][i] - 1.0;
      for (std::size_t j = 0; j < 3; ++j) flux += (m.dg[i][j][i] - m.dg[i][i][j]) * w[j];
    }
    tm[k] = flux * dA;
    for (std::size_t l = 0; l < 3; ++l) {
      double gw = 0.0;
      for (std::size_t i = 0; i < 3; ++i) gw += (m.g[i][l] - (i == l ? 1.0 : 0.0)) * w[i];
      tc[l][k] = (x[l] * flux - (gw - trace * w[l])) * dA;
    }
    if (out.has_momentum) {
      const MomentumJet p = momentum_at(family, x);
      const Vec3 pw = p.pi * w;
      for (std::size_t l = 0; l < 3; ++l) {
        tp[l][k] = pw[l] * dA;
        tj[l][k] = dot(rotation(static_cast<int>(l))(x), pw) * dA;
      }
    }
  }
  const double f16 = 1.0 / (16.0 * std::numbers::pi), f8 = 2.0 * f16;
  out.mass = f16 * pairwise_sum(tm);
  for (std::size_t l = 0; l < 3; ++l) {
    out.center_moment[l] = f16 * pairwise_sum(tc[l]);
    if (out.has_momentum) {
      out.momentum[l] = f8 * pairwise_sum(tp[l]);
      out.angular_moment[l] = f8 * pairwise_sum(tj[l]);
    }
  }
  if (want_curvature) {
    const SurfaceGeometry geo = compute_geometry(make_sphere(grid, {}, r), family);
    const IntrinsicMoments im = intrinsic_moments(geo);
    out.has_curvature = true;
    out.intrinsic_mass = im.mass;
    out.intrinsic_mass_flat = im.mass_flat;
    out.intrinsic_moment = im.center;
    out.intrinsic_moment_flat = im.center_flat;
  }
  return out;
}

/// sphere_fluxes at every radius, evaluated concurrently.
inline std::vector<SphereFluxes> schedule_fluxes(const DataFamily& family, const GridPtr& grid,
                                                 const std::vector<double>& radii,
                                                 bool want_momentum, bool want_curvature) {
  std::vector<SphereFluxes> out(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    out[i] = sphere_fluxes(family, grid, radii[i], want_momentum, want_curvature);
  });
  return out;
}

}  // namespace asymflat
