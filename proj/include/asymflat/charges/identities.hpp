#pragma once

#include <numbers>
#include <vector>

#include "asymflat/core/vec.hpp"
#include "asymflat/spectral/grid.hpp"
#include "asymflat/surface/geometry.hpp"
#include "asymflat/surface/radial_graph.hpp"

namespace asymflat {

/// The first moment of H - 2/R over the coordinate sphere S_R(p) against
/// d sigma_0: int (x - p)^l (H - 2/R) d sigma_0.
inline Vec3 center_identity_lhs(const DataFamily& family, const GridPtr& grid, const Vec3& p,
                                double R) {
  const SurfaceGeometry geo = compute_geometry(make_sphere(grid, p, R), family);
  std::array<std::vector<double>, 3> t;
  for (auto& v : t) v.resize(geo.size());
  for (std::size_t k = 0; k < geo.size(); ++k) {
    const Vec3 d = geo.position[k] - p;
    for (std::size_t l = 0; l < 3; ++l) t[l][k] = d[l] * (geo.H[k] - 2.0 / R) * geo.area_0[k];
  }
  return {pairwise_sum(t[0]), pairwise_sum(t[1]), pairwise_sum(t[2])};
}

/// LHS - 8 pi m (p - C); decays like R^(1 - 2q) under the parity condition.
inline Vec3 center_identity_residual(const DataFamily& family, const GridPtr& grid,
                                     const Vec3& p, double R, double mass, const Vec3& C) {
  return center_identity_lhs(family, grid, p, R) - 8.0 * std::numbers::pi * mass * (p - C);
}

}  // namespace asymflat
