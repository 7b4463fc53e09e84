#pragma once

#include <cmath>
#include <numbers>

namespace oracle {

/// Closed-form integral over the unit sphere of x^a y^b z^c; zero unless all
/// exponents are even, otherwise 2 G(a') G(b') G(c') / G(a' + b' + c') with
/// a' = (a + 1) / 2 and G the gamma function.
inline double sphere_moment(int a, int b, int c) {
  if (a % 2 || b % 2 || c % 2) return 0.0;
  const double A = (a + 1) / 2.0, B = (b + 1) / 2.0, C = (c + 1) / 2.0;
  return 2.0 * std::tgamma(A) * std::tgamma(B) * std::tgamma(C) / std::tgamma(A + B + C);
}

/// 4 pi integral_a^b r^(2(q - s) - 1) dr.
inline double weighted_power_integral(double q, double s, double a, double b) {
  const double e = 2.0 * (q - s);
  if (std::abs(e) < 1e-14) return 4.0 * std::numbers::pi * std::log(b / a);
  return 4.0 * std::numbers::pi * (std::pow(b, e) - std::pow(a, e)) / e;
}

}  // namespace oracle
