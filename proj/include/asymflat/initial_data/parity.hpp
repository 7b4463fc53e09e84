#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asymflat/core/errors.hpp"
#include "asymflat/core/vec.hpp"

namespace asymflat {

template <typename T>
struct ParityParts {
  T odd;
  T even;
};

/// Odd and even parts f(x) -/+ f(-x) over 2 of a sampled field. The sampler
/// returns any type closed under +, - and scaling by double.
template <typename Sampler>
auto parity_decompose(Sampler&& f, const Vec3& x, double R0) {
  if (!(norm(x) > R0))
    throw DomainError("parity split needs |x| > R0 so that -x is in the chart");
  const auto fx = f(x);
  const auto fm = f(-x);
  using T = std::decay_t<decltype(fx)>;
  return ParityParts<T>{0.5 * (fx - fm), 0.5 * (fx + fm)};
}

struct DecayFit {
  double exponent = 0.0;   // slope of log(value) against log(radius)
  double intercept = 0.0;  // log(value) at radius 1
  double rms = 0.0;        // rms residual in log space
};

/// Least-squares power law value ~ radius^exponent. Needs at least four
/// strictly positive samples spanning a decade in radius.
inline DecayFit decay_exponent_fit(std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 4)
    throw InputError("decay fit needs at least 4 samples, got " +
                     std::to_string(samples.size()));
  double rmin = samples.front().first, rmax = rmin;
  for (const auto& [r, v] : samples) {
    if (!(r > 0.0)) throw InputError("decay fit radii must be positive");
    if (!(v > 0.0) || !std::isfinite(v))
      throw InputError("decay fit values must be positive and finite");
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  if (rmax < 10.0 * rmin * (1.0 - 1e-12))
    throw InputError("decay fit radii must span at least one decade");
  const double n = static_cast<double>(samples.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [r, v] : samples) {
    const double x = std::log(r), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  DecayFit fit;
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.exponent * sx) / n;
  double ss = 0.0;
  for (const auto& [r, v] : samples) {
    const double e = std::log(v) - (fit.intercept + fit.exponent * std::log(r));
    ss += e * e;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

inline DecayFit decay_exponent_fit(const std::vector<double>& radii,
                                   const std::vector<double>& values) {
  if (radii.size() != values.size())
    throw InputError("decay fit: radii and values differ in length");
  std::vector<std::pair<double, double>> s;
  s.reserve(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) s.emplace_back(radii[i], values[i]);
  return decay_exponent_fit(s);
}

}  // namespace asymflat
