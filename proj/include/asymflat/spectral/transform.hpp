#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "asymflat/core/errors.hpp"
#include "asymflat/core/vec.hpp"
#include "asymflat/spectral/grid.hpp"
#include "asymflat/spectral/legendre.hpp"

namespace asymflat {

/// Real orthonormal spherical-harmonic coefficients a[l][m], stored flat at
/// index l^2 + l + m.
struct HarmonicCoefficients {
  int lmax = 0;
  std::vector<double> a;

  HarmonicCoefficients() = default;
  explicit HarmonicCoefficients(int l) : lmax(l), a(count(l), 0.0) {}

  static std::size_t count(int l) {
    return static_cast<std::size_t>((l + 1) * (l + 1));
  }
  static std::size_t index(int l, int m) {
    return static_cast<std::size_t>(l * l + l + m);
  }
  double& at(int l, int m) { return a[index(l, m)]; }
  double at(int l, int m) const { return a[index(l, m)]; }

  /// Root-sum-square of the coefficients (the L2 norm on the unit sphere).
  double norm() const {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
  }
};

/// Real harmonic Y_lm evaluated from a Legendre table and an azimuth.
inline double real_harmonic(const LegendreTable& t, int l, int m, double phi) {
  if (m == 0) return t.P(l, 0);
  if (m > 0) return std::numbers::sqrt2 * t.P(l, m) * std::cos(m * phi);
  return std::numbers::sqrt2 * t.P(l, -m) * std::sin(-m * phi);
}

/// Coefficients (a_{1,1}, a_{1,-1}, a_{1,0}) as a Cartesian (x, y, z) vector.
inline Vec3 l1_block(const HarmonicCoefficients& c) {
  return {c.at(1, 1), c.at(1, -1), c.at(1, 0)};
}

/// The l = 1 part of f equals v . omega with v = sqrt(3 / 4 pi) l1_block.
inline Vec3 l1_cartesian(const HarmonicCoefficients& c) {
  return std::sqrt(3.0 / (4.0 * std::numbers::pi)) * l1_block(c);
}

/// Analysis by Gauss-Legendre x trapezoid quadrature, separated into a
/// Fourier sum per ring followed by a Legendre sum per order.
inline HarmonicCoefficients sht_forward(const SphereGrid& grid,
                                        std::span<const double> values,
                                        int lmax_out = -1) {
  detail::check_size(grid, values.size());
  const int L = lmax_out < 0 ? grid.lmax : lmax_out;
  if (L > grid.lmax) throw InputError("transform degree exceeds grid lmax");
  HarmonicCoefficients out(L);
  const double dphi = 2.0 * std::numbers::pi / grid.n_phi;
  std::vector<double> cm(static_cast<std::size_t>(L) + 1), sm(cm.size());
  for (int i = 0; i < grid.n_theta; ++i) {
    const std::size_t row = grid.index(i, 0);
    for (int m = 0; m <= L; ++m) {
      double c = 0.0, s = 0.0;
      const auto& cosm = grid.cos_mphi[static_cast<std::size_t>(m)];
      const auto& sinm = grid.sin_mphi[static_cast<std::size_t>(m)];
      for (int j = 0; j < grid.n_phi; ++j) {
        const double f = values[row + static_cast<std::size_t>(j)];
        c += f * cosm[static_cast<std::size_t>(j)];
        s += f * sinm[static_cast<std::size_t>(j)];
      }
      cm[static_cast<std::size_t>(m)] = c * dphi;
      sm[static_cast<std::size_t>(m)] = s * dphi;
    }
    const LegendreTable& t = grid.legendre[static_cast<std::size_t>(i)];
    const double w = grid.ring_weight[static_cast<std::size_t>(i)];
    for (int l = 0; l <= L; ++l) {
      out.at(l, 0) += w * t.P(l, 0) * cm[0];
      for (int m = 1; m <= l; ++m) {
        const double p = w * std::numbers::sqrt2 * t.P(l, m);
        out.at(l, m) += p * cm[static_cast<std::size_t>(m)];
        out.at(l, -m) += p * sm[static_cast<std::size_t>(m)];
      }
    }
  }
  return out;
}

/// A field and its angular partials at every grid node.
struct SpectralField {
  std::vector<double> f, f_t, f_p, f_tt, f_tp, f_pp;
};

/// Synthesis of f together with its theta/phi partials to second order.
inline SpectralField synthesize(const SphereGrid& grid,
                                const HarmonicCoefficients& c) {
  if (c.lmax > grid.lmax) throw InputError("coefficient degree exceeds grid lmax");
  const std::size_t n = grid.size();
  SpectralField out;
  for (auto* v : {&out.f, &out.f_t, &out.f_p, &out.f_tt, &out.f_tp, &out.f_pp})
    v->assign(n, 0.0);
  const int L = c.lmax;
  for (int i = 0; i < grid.n_theta; ++i) {
    const LegendreTable& t = grid.legendre[static_cast<std::size_t>(i)];
    const std::size_t row = grid.index(i, 0);
    for (int m = 0; m <= L; ++m) {
      // Ring amplitudes of cos(m phi) and sin(m phi) and their theta partials.
      double A = 0, At = 0, Att = 0, B = 0, Bt = 0, Btt = 0;
      const double s = (m == 0) ? 1.0 : std::numbers::sqrt2;
      for (int l = m; l <= L; ++l) {
        const double a = c.at(l, m) * s;
        A += a * t.P(l, m);
        At += a * t.dP(l, m);
        Att += a * t.ddP(l, m);
        if (m > 0) {
          const double b = c.at(l, -m) * s;
          B += b * t.P(l, m);
          Bt += b * t.dP(l, m);
          Btt += b * t.ddP(l, m);
        }
      }
      const auto& cosm = grid.cos_mphi[static_cast<std::size_t>(m)];
      const auto& sinm = grid.sin_mphi[static_cast<std::size_t>(m)];
      const double mm = m;
      for (int j = 0; j < grid.n_phi; ++j) {
        const std::size_t k = row + static_cast<std::size_t>(j);
        const double co = cosm[static_cast<std::size_t>(j)];
        const double si = sinm[static_cast<std::size_t>(j)];
        out.f[k] += A * co + B * si;
        out.f_t[k] += At * co + Bt * si;
        out.f_tt[k] += Att * co + Btt * si;
        out.f_p[k] += mm * (-A * si + B * co);
        out.f_tp[k] += mm * (-At * si + Bt * co);
        out.f_pp[k] += -mm * mm * (A * co + B * si);
      }
    }
  }
  return out;
}

inline std::vector<double> sht_inverse(const SphereGrid& grid,
                                       const HarmonicCoefficients& c) {
  if (c.lmax > grid.lmax) throw InputError("coefficient degree exceeds grid lmax");
  const std::size_t n = grid.size();
  std::vector<double> f(n, 0.0);
  for (int i = 0; i < grid.n_theta; ++i) {
    const LegendreTable& t = grid.legendre[static_cast<std::size_t>(i)];
    const std::size_t row = grid.index(i, 0);
    for (int m = 0; m <= c.lmax; ++m) {
      double A = 0, B = 0;
      const double s = (m == 0) ? 1.0 : std::numbers::sqrt2;
      for (int l = m; l <= c.lmax; ++l) {
        A += c.at(l, m) * s * t.P(l, m);
        if (m > 0) B += c.at(l, -m) * s * t.P(l, m);
      }
      const auto& cosm = grid.cos_mphi[static_cast<std::size_t>(m)];
      const auto& sinm = grid.sin_mphi[static_cast<std::size_t>(m)];
      for (int j = 0; j < grid.n_phi; ++j)
        f[row + static_cast<std::size_t>(j)] +=
            A * cosm[static_cast<std::size_t>(j)] + B * sinm[static_cast<std::size_t>(j)];
    }
  }
  return f;
}

/// Value of the expansion in an arbitrary unit direction.
inline double evaluate_at(const HarmonicCoefficients& c, const Vec3& direction) {
  const double r = norm(direction);
  if (!(r > 0.0)) throw InputError("direction must be nonzero");
  const double theta = std::acos(std::clamp(direction[2] / r, -1.0, 1.0));
  const double phi = std::atan2(direction[1], direction[0]);
  const LegendreTable t = legendre_table(c.lmax, theta);
  double f = 0.0;
  for (int l = 0; l <= c.lmax; ++l)
    for (int m = -l; m <= l; ++m) f += c.at(l, m) * real_harmonic(t, l, m, phi);
  return f;
}

/// Coefficients truncated or zero-padded to degree L.
inline HarmonicCoefficients resize(const HarmonicCoefficients& c, int L) {
  HarmonicCoefficients out(L);
  const int n = std::min(L, c.lmax);
  for (int l = 0; l <= n; ++l)
    for (int m = -l; m <= l; ++m) out.at(l, m) = c.at(l, m);
  return out;
}

}  // namespace asymflat
