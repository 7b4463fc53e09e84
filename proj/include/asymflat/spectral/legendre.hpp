#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace asymflat {

/// Packed index of (l, m), 0 <= m <= l.
constexpr std::size_t legendre_index(int l, int m) {
  return static_cast<std::size_t>(l * (l + 1) / 2 + m);
}

/// Orthonormal associated Legendre functions P~_l^m(cos theta) (no
/// Condon-Shortley phase) with first and second theta-derivatives.
/// Y_l0 = P~_l^0, Y_lm = sqrt(2) P~_l^m cos(m phi), Y_l,-m = sqrt(2) P~_l^m sin(m phi).
struct LegendreTable {
  int lmax = 0;
  std::vector<double> p, dp, ddp;

  double P(int l, int m) const { return p[legendre_index(l, m)]; }
  double dP(int l, int m) const { return dp[legendre_index(l, m)]; }
  double ddP(int l, int m) const { return ddp[legendre_index(l, m)]; }
};

/// Second derivatives are left at zero on the poles (theta = 0 or pi), where
/// the Legendre equation is singular; grid nodes never sit on a pole.
inline LegendreTable legendre_table(int lmax, double theta) {
  LegendreTable t;
  t.lmax = lmax;
  const std::size_t n = legendre_index(lmax, lmax) + 1;
  t.p.assign(n, 0.0);
  t.dp.assign(n, 0.0);
  t.ddp.assign(n, 0.0);
  const double c = std::cos(theta), s = std::sin(theta);

  double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    t.p[legendre_index(m, m)] = pmm;
    if (m + 1 <= lmax) t.p[legendre_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * c * pmm;
    for (int l = m + 2; l <= lmax; ++l) {
      const double ll = l, mm = m;
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) /
                                 (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      t.p[legendre_index(l, m)] =
          a * (c * t.p[legendre_index(l - 1, m)] - b * t.p[legendre_index(l - 2, m)]);
    }
  }
  for (int l = 0; l <= lmax; ++l) {
    for (int m = 0; m <= l; ++m) {
      const double ll = l, mm = m;
      const double up = (m + 1 <= l) ? t.P(l, m + 1) : 0.0;
      double d;
      if (m == 0) {
        d = -std::sqrt(ll * (ll + 1.0)) * up;
      } else {
        d = 0.5 * (std::sqrt((ll + mm) * (ll - mm + 1.0)) * t.P(l, m - 1) -
                   std::sqrt((ll + mm + 1.0) * (ll - mm)) * up);
      }
      t.dp[legendre_index(l, m)] = d;
      if (s > 0.0)
        t.ddp[legendre_index(l, m)] =
            -(c / s) * d - (ll * (ll + 1.0) - mm * mm / (s * s)) * t.P(l, m);
    }
  }
  return t;
}

}  // namespace asymflat
