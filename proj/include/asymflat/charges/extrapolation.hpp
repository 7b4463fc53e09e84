#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "asymflat/core/errors.hpp"

namespace asymflat {

/// Strictly increasing list of coordinate-sphere radii.
struct RadiusSchedule {
  std::vector<double> radii;
};

inline RadiusSchedule geometric_schedule(double r0, double factor, int count) {
  if (!(r0 > 0.0) || !(factor > 1.0) || count < 1)
    throw ConfigError("geometric schedule needs r0 > 0, factor > 1, count >= 1");
  RadiusSchedule s;
  double r = r0;
  for (int k = 0; k < count; ++k, r *= factor) s.radii.push_back(r);
  return s;
}

inline void validate_schedule(const RadiusSchedule& s, double R0, std::size_t min_len = 4) {
  if (s.radii.size() < min_len)
    throw ConfigError("radius schedule needs at least " + std::to_string(min_len) +
                      " radii, got " + std::to_string(s.radii.size()));
  for (std::size_t k = 0; k < s.radii.size(); ++k) {
    if (!(s.radii[k] > R0))
      throw DomainError("radius " + std::to_string(s.radii[k]) +
                        " is inside the chart radius " + std::to_string(R0));
    if (k > 0 && !(s.radii[k] > s.radii[k - 1]))
      throw ConfigError("radius schedule must be strictly increasing");
  }
}

/// Limit of value(r) = v + c r^-s fitted to the last four samples.
struct Extrapolation {
  double value = 0.0;
  double error = 0.0;     // max(fit residual, change from the previous window)
  double exponent = 0.0;  // fitted s
  double residual = 0.0;  // rms residual of the fit
};

namespace detail {

struct PowerFit {
  double v = 0.0, c = 0.0, ss = 0.0;
};

// Linear least squares in (v, c) for a fixed exponent; radii are scaled by
// the last radius to keep the basis well conditioned.
inline PowerFit power_fit(const double* r, const double* y, std::size_t n, double s) {
  const double rs = r[n - 1];
  double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::pow(r[i] / rs, -s);
    s1 += 1;
    sx += x;
    sxx += x * x;
    sy += y[i];
    sxy += x * y[i];
  }
  PowerFit f;
  const double det = s1 * sxx - sx * sx;
  if (std::abs(det) < 1e-300) {
    f.v = sy / s1;
  } else {
    f.c = (s1 * sxy - sx * sy) / det;
    f.v = (sy - f.c * sx) / s1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double e = f.v + f.c * std::pow(r[i] / rs, -s) - y[i];
    f.ss += e * e;
  }
  return f;
}

inline Extrapolation fit_window(const double* r, const double* y, std::size_t n) {
  constexpr double lo = 0.05, hi = 8.0;
  constexpr int scan = 160;
  auto cost = [&](double s) { return power_fit(r, y, n, s).ss; };
  int best = 0;
  double best_cost = cost(lo);
  const double step = std::log(hi / lo) / scan;
  for (int i = 1; i <= scan; ++i) {
    const double c = cost(lo * std::exp(step * i));
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  // Golden-section refinement in log s around the best scan point.
  double a = std::log(lo) + step * std::max(best - 1, 0);
  double b = std::log(lo) + step * std::min(best + 1, scan);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = cost(std::exp(x1)), f2 = cost(std::exp(x2));
  for (int it = 0; it < 100 && b - a > 1e-13; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = cost(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = cost(std::exp(x2));
    }
  }
  double s = std::exp(0.5 * (a + b));
  if (best_cost < cost(s)) s = lo * std::exp(step * best);
  const PowerFit f = power_fit(r, y, n, s);
  Extrapolation e;
  e.value = f.v;
  e.exponent = s;
  e.residual = std::sqrt(f.ss / static_cast<double>(n));
  e.error = e.residual;
  return e;
}

}  // namespace detail

/// Power-law extrapolation to r -> infinity over the last four samples. With
/// five or more samples the error estimate also includes the change from the
/// window ending one sample earlier.
inline Extrapolation extrapolate(const std::vector<double>& radii,
                                 const std::vector<double>& values) {
  if (radii.size() != values.size())
    throw InputError("extrapolation: radii and values differ in length");
  const std::size_t n = radii.size();
  if (n < 4) throw InputError("extrapolation needs at least 4 samples");
  for (double v : values)
    if (!std::isfinite(v)) throw NumericalError("extrapolation input is not finite");
  Extrapolation e = detail::fit_window(radii.data() + n - 4, values.data() + n - 4, 4);
  if (n >= 5) {
    const Extrapolation prev =
        detail::fit_window(radii.data() + n - 5, values.data() + n - 5, 4);
    e.error = std::max(e.error, std::abs(e.value - prev.value));
  }
  return e;
}

}  // namespace asymflat
