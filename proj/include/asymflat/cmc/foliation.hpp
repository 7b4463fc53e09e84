#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "asymflat/charges/charges.hpp"
#include "asymflat/core/errors.hpp"
#include "asymflat/core/parallel.hpp"
#include "asymflat/spectral/helmholtz.hpp"
#include "asymflat/surface/geometry.hpp"
#include "asymflat/surface/radial_graph.hpp"
#include "asymflat/surface/stability.hpp"

namespace asymflat {

struct SolveSettings {
  int lmax = 24;
  double cmc_tol = 0.0;  // 0 selects 1e-9 * 2 / R
  int max_picard_iters = 50;
  double center_tol = 1e-8;  // center step size at which selection stops
  int max_center_iters = 50;
  double damping = 1.0;

  double tolerance(double R) const { return cmc_tol > 0.0 ? cmc_tol : 1e-9 * 2.0 / R; }
};

inline void validate(const SolveSettings& s) {
  if (s.lmax < 4) throw ConfigError("CMC solve needs lmax >= 4");
  if (s.cmc_tol < 0.0 || !(s.center_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (s.max_picard_iters < 1 || s.max_center_iters < 1)
    throw ConfigError("iteration limits must be positive");
  if (!(s.damping > 0.0 && s.damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
}

struct FoliationLeaf {
  double R = 0.0;
  double H_target = 0.0;
  RadialGraphSurface surface;
  std::vector<double> H_achieved;
  double H_constancy = 0.0;  // max |H - mean H|
  Vec3 p_star{};
  Vec3 centroid{};  // Euclidean centroid
  double lambda0 = 0.0;
  double lambda1 = 0.0;  // second eigenvalue
  double lambda1_meanzero = 0.0;
  double area_g = 0.0;
  double ricci_flux = 0.0;   // int Ric(nu, nu) d sigma_g
  double ricci_mass = 0.0;   // ricci_flux * r_A / (-8 pi), r_A the area radius
  std::vector<double> residuals;
  double contraction = 0.0;  // mean residual ratio over the final steps
  bool stability_checked = false;
};

namespace detail {

// l = 1 moment R^3 int omega (H - mean) d omega of node values on a graph
// around p; equals 8 pi m (p - C) to leading order.
inline Vec3 center_moment(const SphereGrid& grid, const std::vector<double>& f, double R) {
  const HarmonicCoefficients c = sht_forward(grid, f, 1);
  return (R * R * R * 4.0 * std::numbers::pi / 3.0) * l1_cartesian(c);
}

inline std::vector<double> deviation(const SurfaceGeometry& geo, double mean) {
  std::vector<double> d(geo.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = geo.H[k] - mean;
  return d;
}

inline void require_nonzero_mass(double mass) {
  if (!(std::abs(mass) > 1e-12))
    throw KernelObstruction(
        "mass is zero: the l = 1 kernel of the linearized operator cannot be removed by "
        "moving the center",
        {});
}

}  // namespace detail

/// Coordinate sphere S_R(p) corrected once by the linearized equation:
/// psi = solve(f - mean f) with f = H - 2/R, the l = 1 block projected out.
inline RadialGraphSurface approximate_sphere(const DataFamily& family, const Vec3& p, double R,
                                             const SolveSettings& s = {}) {
  validate(s);
  RadialGraphSurface sphere = make_sphere(build_grid(s.lmax), p, R);
  const SurfaceGeometry geo = compute_geometry(sphere, family);
  std::vector<double> f(geo.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = geo.H[k] - 2.0 / R;
  HarmonicCoefficients c = sht_forward(*sphere.grid, f);
  c.at(0, 0) = 0.0;
  sphere.psi = helmholtz_solve(c, R, L1Policy::ProjectOut);
  return sphere;
}

/// Moves the center of S_R(p) until the l = 1 moment of its mean curvature
/// vanishes, using the first-moment identity as the update map.
inline Vec3 select_center(const DataFamily& family, double R, const Vec3& p_init, double mass,
                          const SolveSettings& s = {}) {
  validate(s);
  detail::require_nonzero_mass(mass);
  const GridPtr grid = build_grid(s.lmax);
  Vec3 p = p_init;
  std::vector<double> steps;
  int growth = 0;
  for (int it = 0; it < s.max_center_iters; ++it) {
    const SurfaceGeometry geo = compute_geometry(make_sphere(grid, p, R), family);
    const Vec3 v = detail::center_moment(*grid, detail::deviation(geo, 2.0 / R), R);
    const Vec3 step = (-s.damping / (8.0 * std::numbers::pi * mass)) * v;
    p = p + step;
    steps.push_back(norm(step));
    if (steps.back() <= s.center_tol * std::max(1.0, norm(p))) return p;
    if (steps.size() >= 2 && steps.back() >= steps[steps.size() - 2]) {
      if (++growth >= 3)
        throw DivergenceError("center selection does not contract at R = " + std::to_string(R) +
                                  "; try a larger radius",
                              steps);
    } else {
      growth = 0;
    }
  }
  throw DivergenceError("center selection did not reach the tolerance at R = " +
                            std::to_string(R),
                        steps);
}

/// CMC surface near S_R(C). Picard steps psi += solve(H - mean H) alternate
/// with one center correction each, until max |H - mean H| <= tolerance.
inline FoliationLeaf solve_cmc(const DataFamily& family, double R, double mass,
                               const SolveSettings& s = {}, const Vec3& p_init = {}) {
  validate(s);
  const double tol = s.tolerance(R);
  const Vec3 p0 = select_center(family, R, p_init, mass, s);
  RadialGraphSurface surf = approximate_sphere(family, p0, R, s);
  FoliationLeaf leaf;
  leaf.R = R;
  int growth = 0;
  for (int it = 0;; ++it) {
    const SurfaceGeometry geo = compute_geometry(surf, family);
    const double mean = surface_mean(geo, geo.H);
    const std::vector<double> d = detail::deviation(geo, mean);
    double resid = 0.0;
    for (double x : d) resid = std::max(resid, std::abs(x));
    leaf.residuals.push_back(resid);
    const std::size_t n = leaf.residuals.size();
    if (resid <= tol) {
      leaf.H_target = mean;
      leaf.H_achieved = geo.H;
      leaf.H_constancy = resid;
      const AreaCentroid ac = area_and_centroid(geo);
      leaf.centroid = ac.centroid;
      leaf.area_g = ac.area_g;
      leaf.ricci_flux = ricci_flux(geo);
      leaf.ricci_mass =
          leaf.ricci_flux * std::sqrt(ac.area_g / (4.0 * std::numbers::pi)) / (-8.0 * std::numbers::pi);
      const StabilityOperator op = assemble_stability(surf, geo);
      const std::vector<double> ev = lowest_eigenvalues(op, 2);
      leaf.lambda0 = ev[0];
      leaf.lambda1 = ev[1];
      leaf.lambda1_meanzero = lowest_mean_zero_eigenvalue(op);
      leaf.stability_checked = mass > 0.0;
      break;
    }
    if (n >= 2 && resid >= leaf.residuals[n - 2]) {
      if (++growth >= 3)
        throw DivergenceError("Picard iteration does not contract at R = " + std::to_string(R) +
                                  "; try a larger radius",
                              leaf.residuals);
    } else {
      growth = 0;
    }
    if (it + 1 >= s.max_picard_iters)
      throw DivergenceError("Picard iteration did not reach the CMC tolerance at R = " +
                                std::to_string(R) + " within " +
                                std::to_string(s.max_picard_iters) + " iterations",
                            leaf.residuals);
    const Vec3 v = detail::center_moment(*surf.grid, d, R);
    HarmonicCoefficients c = sht_forward(*surf.grid, d);
    const HarmonicCoefficients dpsi = helmholtz_solve(c, R, L1Policy::ProjectOut);
    for (std::size_t k = 0; k < surf.psi.a.size(); ++k) surf.psi.a[k] += s.damping * dpsi.a[k];
    surf.p = surf.p + (-s.damping / (8.0 * std::numbers::pi * mass)) * v;
  }
  const std::size_t n = leaf.residuals.size();
  if (n >= 2) {
    const std::size_t k = std::min<std::size_t>(5, n - 1);
    double acc = 0.0;
    for (std::size_t i = n - k; i < n; ++i)
      acc += leaf.residuals[i - 1] > 0.0 ? leaf.residuals[i] / leaf.residuals[i - 1] : 0.0;
    leaf.contraction = acc / static_cast<double>(k);
    if (leaf.contraction > 0.9)
      throw DivergenceError("Picard iteration contracts too slowly at R = " + std::to_string(R),
                            leaf.residuals);
  }
  leaf.p_star = surf.p;
  leaf.surface = std::move(surf);
  return leaf;
}

struct LeafPair {
  double R_inner = 0.0, R_outer = 0.0;
  double min_gap = 0.0;  // min over directions of the outer minus inner radius
  double max_gap = 0.0;
};

struct Foliation {
  std::vector<FoliationLeaf> leaves;
  std::vector<LeafPair> pairs;
  bool disjoint = true;
  bool stable = true;  // every leaf strictly stable; vacuous when m <= 0
  std::string report;  // overlap or stability findings
};

namespace detail {

inline LeafPair compare_leaves(const FoliationLeaf& in, const FoliationLeaf& out,
                               const SphereGrid& dirs) {
  RadialGraphSurface a = in.surface, b = out.surface;
  const Vec3 o = in.p_star;
  a.p = a.p - o;
  b.p = b.p - o;
  LeafPair lp{in.R, out.R, std::numeric_limits<double>::infinity(), 0.0};
  for (const Vec3& w : dirs.nodes) {
    const double gap = origin_radius(b, w) - origin_radius(a, w);
    lp.min_gap = std::min(lp.min_gap, gap);
    lp.max_gap = std::max(lp.max_gap, gap);
  }
  return lp;
}

}  // namespace detail

/// Leaves at ascending radii, solved concurrently, with pairwise disjointness
/// and stability recorded rather than enforced.
inline Foliation foliation_sweep(const DataFamily& family, const std::vector<double>& radii,
                                 double mass, const SolveSettings& s = {},
                                 const Vec3& p_init = {}) {
  if (radii.empty()) throw InputError("foliation needs at least one radius");
  for (std::size_t k = 1; k < radii.size(); ++k)
    if (!(radii[k] > radii[k - 1])) throw InputError("foliation radii must be ascending");
  detail::require_nonzero_mass(mass);
  Foliation f;
  f.leaves.resize(radii.size());
  parallel_for(radii.size(),
               [&](std::size_t k) { f.leaves[k] = solve_cmc(family, radii[k], mass, s, p_init); });
  const GridPtr dirs = build_grid(2 * s.lmax);
  for (std::size_t k = 1; k < f.leaves.size(); ++k) {
    const LeafPair lp = detail::compare_leaves(f.leaves[k - 1], f.leaves[k], *dirs);
    if (!(lp.min_gap > 0.0)) {
      f.disjoint = false;
      f.report += "leaves at R = " + std::to_string(lp.R_inner) + " and " +
                  std::to_string(lp.R_outer) + " overlap (min gap " +
                  std::to_string(lp.min_gap) + "); ";
    }
    f.pairs.push_back(lp);
  }
  if (mass > 0.0)
    for (const auto& leaf : f.leaves)
      if (!(leaf.lambda1_meanzero > 0.0)) {
        f.stable = false;
        f.report += "leaf at R = " + std::to_string(leaf.R) + " is not strictly stable; ";
      }
  return f;
}

struct GeometricCenter {
  std::vector<double> radii;
  std::vector<Vec3> centroids;
  VectorCharge limit;
};

/// Euclidean leaf centroids and their extrapolation to R -> infinity.
inline GeometricCenter geometric_center_limit(const std::vector<FoliationLeaf>& leaves) {
  if (leaves.size() < 4)
    throw InputError("geometric center needs at least 4 leaves (got " +
                     std::to_string(leaves.size()) + ")");
  GeometricCenter g;
  for (const auto& l : leaves) {
    g.radii.push_back(l.R);
    g.centroids.push_back(l.centroid);
  }
  g.limit = make_vector_charge(g.radii, g.centroids);
  return g;
}

/// Whether the geometric center agrees with C within the combined error and
/// an absolute floor.
inline bool agrees_with(const GeometricCenter& g, const VectorCharge& C, double floor = 1e-3) {
  return norm(g.limit.value() - C.value()) <= floor + g.limit.error() + C.error();
}

}  // namespace asymflat
