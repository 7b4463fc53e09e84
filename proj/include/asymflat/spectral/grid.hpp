#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "asymflat/core/errors.hpp"
#include "asymflat/core/vec.hpp"
#include "asymflat/spectral/legendre.hpp"

namespace asymflat {

/// Gauss-Legendre colatitudes times uniform longitudes. Nodes are stored
/// ring-major: node (i, j) has index i * n_phi + j, with theta ascending.
/// Also caches the Legendre and trigonometric tables used by the transforms.
struct SphereGrid {
  int lmax = 0;
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> theta, cos_theta, sin_theta, ring_weight;  // per ring
  std::vector<double> phi;                                       // per column
  std::vector<Vec3> nodes;
  std::vector<double> weights;  // sum to 4 pi
  std::vector<LegendreTable> legendre;         // per ring, degree lmax
  std::vector<std::vector<double>> cos_mphi;   // [m][j]
  std::vector<std::vector<double>> sin_mphi;   // [m][j]

  std::size_t size() const { return nodes.size(); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_phi) +
           static_cast<std::size_t>(j);
  }
};

using GridPtr = std::shared_ptr<const SphereGrid>;

/// Gauss-Legendre nodes on [-1, 1] in descending order with their weights.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(n - 1 - i)] = wt;
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;
}

/// Product grid exact for spherical polynomials of degree <= 2 lmax.
/// Defaults: n_theta = lmax + 1, n_phi = 2 lmax + 2.
inline GridPtr build_grid(int lmax, int n_theta = 0, int n_phi = 0) {
  if (lmax < 4)
    throw ConfigError("lmax must be at least 4 (got " + std::to_string(lmax) + ")");
  if (n_theta == 0) n_theta = lmax + 1;
  if (n_phi == 0) n_phi = 2 * lmax + 2;
  if (n_theta < lmax + 1) throw ConfigError("n_theta must be >= lmax + 1");
  if (n_phi < 2 * lmax + 1) throw ConfigError("n_phi must be >= 2 lmax + 1");

  auto g = std::make_shared<SphereGrid>();
  g->lmax = lmax;
  g->n_theta = n_theta;
  g->n_phi = n_phi;
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  for (int i = 0; i < n_theta; ++i) {
    const double c = x[static_cast<std::size_t>(i)];
    const double th = std::acos(c);
    g->theta.push_back(th);
    g->cos_theta.push_back(c);
    g->sin_theta.push_back(std::sqrt((1.0 - c) * (1.0 + c)));
    g->ring_weight.push_back(w[static_cast<std::size_t>(i)]);
    g->legendre.push_back(legendre_table(lmax, th));
  }
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  for (int j = 0; j < n_phi; ++j) g->phi.push_back(j * dphi);
  g->cos_mphi.assign(static_cast<std::size_t>(lmax) + 1, {});
  g->sin_mphi.assign(static_cast<std::size_t>(lmax) + 1, {});
  for (int m = 0; m <= lmax; ++m)
    for (int j = 0; j < n_phi; ++j) {
      g->cos_mphi[static_cast<std::size_t>(m)].push_back(std::cos(m * g->phi[static_cast<std::size_t>(j)]));
      g->sin_mphi[static_cast<std::size_t>(m)].push_back(std::sin(m * g->phi[static_cast<std::size_t>(j)]));
    }
  for (int i = 0; i < n_theta; ++i)
    for (int j = 0; j < n_phi; ++j) {
      const double s = g->sin_theta[static_cast<std::size_t>(i)];
      const double ph = g->phi[static_cast<std::size_t>(j)];
      g->nodes.push_back(Vec3{s * std::cos(ph), s * std::sin(ph),
                              g->cos_theta[static_cast<std::size_t>(i)]});
      g->weights.push_back(g->ring_weight[static_cast<std::size_t>(i)] * dphi);
    }
  return g;
}

namespace detail {
inline void check_size(const SphereGrid& grid, std::size_t n) {
  if (n != grid.size())
    throw InputError("expected " + std::to_string(grid.size()) +
                     " node values, got " + std::to_string(n));
}
}  // namespace detail

/// Quadrature sum of weights * values in fixed node order with pairwise
/// summation.
inline double integrate(const SphereGrid& grid, std::span<const double> values) {
  detail::check_size(grid, values.size());
  std::vector<double> terms(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) terms[k] = grid.weights[k] * values[k];
  return pairwise_sum(terms);
}

/// Same as integrate with additional per-node weights (area densities).
inline double integrate(const SphereGrid& grid, std::span<const double> values,
                        std::span<const double> density) {
  detail::check_size(grid, values.size());
  detail::check_size(grid, density.size());
  std::vector<double> terms(values.size());
  for (std::size_t k = 0; k < values.size(); ++k)
    terms[k] = grid.weights[k] * values[k] * density[k];
  return pairwise_sum(terms);
}

}  // namespace asymflat
