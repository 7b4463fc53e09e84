#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "asymflat/core/errors.hpp"
#include "asymflat/core/vec.hpp"
#include "asymflat/spectral/grid.hpp"
#include "asymflat/spectral/transform.hpp"

namespace asymflat {

/// Closed surface x = p + (R + psi(omega)) omega, psi band-limited to the
/// grid degree and stored by its harmonic coefficients.
struct RadialGraphSurface {
  Vec3 p{};
  double R = 1.0;
  HarmonicCoefficients psi;
  GridPtr grid;

  std::vector<double> psi_values() const { return sht_inverse(*grid, psi); }

  /// Radial distance from p along a unit direction.
  double radius_along(const Vec3& omega) const { return R + evaluate_at(psi, omega); }
};

inline RadialGraphSurface make_sphere(GridPtr grid, Vec3 p, double R) {
  if (!(R > 0.0)) throw InputError("sphere radius must be positive");
  RadialGraphSurface s;
  s.p = p;
  s.R = R;
  s.psi = HarmonicCoefficients(grid->lmax);
  s.grid = std::move(grid);
  return s;
}

/// Radial graph with psi given at the grid nodes (projected onto the basis).
inline RadialGraphSurface make_radial_graph(GridPtr grid, Vec3 p, double R,
                                            const std::vector<double>& psi_nodes) {
  RadialGraphSurface s = make_sphere(grid, p, R);
  s.psi = sht_forward(*grid, psi_nodes);
  return s;
}

/// Centered coordinate ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 written as
/// a radial graph over the sphere of radius R = (abc)^(1/3). The radial
/// function is smooth but not band-limited; it is projected to degree lmax.
inline RadialGraphSurface make_ellipsoid(GridPtr grid, Vec3 center, Vec3 axes) {
  for (double a : axes)
    if (!(a > 0.0)) throw InputError("ellipsoid axes must be positive");
  const double R = std::cbrt(axes[0] * axes[1] * axes[2]);
  std::vector<double> psi(grid->size());
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const Vec3& w = grid->nodes[k];
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += w[i] * w[i] / (axes[i] * axes[i]);
    psi[k] = 1.0 / std::sqrt(s) - R;
  }
  return make_radial_graph(grid, center, R, psi);
}

}  // namespace asymflat
