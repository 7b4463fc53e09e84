#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "asymflat/core/errors.hpp"
#include "asymflat/core/jet.hpp"
#include "asymflat/core/parallel.hpp"
#include "asymflat/initial_data/evaluate.hpp"
#include "asymflat/spectral/grid.hpp"

namespace asymflat {

/// A (possibly multi-component) field with analytic first and second partials.
using FieldSampler = std::function<std::vector<Jet>(const Vec3&)>;

struct Annulus {
  double inner = 1.0;
  double outer = std::numeric_limits<double>::infinity();
};

struct SobolevSettings {
  int lmax = 8;            // angular grid
  int radial_points = 12;  // Gauss points per radial panel
  int max_shells = 400;    // doubling shells tried on an infinite annulus
};

struct WeightedNorm {
  double integral = 0.0;  // sum_alpha int (|D^a f| rho^(|a|+q))^p rho^-3 dx, or the sup for p = inf
  double norm = 0.0;      // integral^(1/p)
  int shells = 0;
};

namespace detail {

// Weighted derivative terms (|D^a f| rho^(|a| + q)) for every multi-index a
// with |a| <= k, each |.| the Euclidean norm over components.
inline std::vector<double> weighted_terms(const std::vector<Jet>& f, const Vec3& x, int k,
                                          double q) {
  const double rho = norm(x);
  std::vector<double> out;
  double s = 0.0;
  for (const Jet& c : f) s += c.v * c.v;
  out.push_back(std::sqrt(s) * std::pow(rho, q));
  if (k >= 1)
    for (std::size_t a = 0; a < 3; ++a) {
      s = 0.0;
      for (const Jet& c : f) s += c.d[a] * c.d[a];
      out.push_back(std::sqrt(s) * std::pow(rho, 1.0 + q));
    }
  if (k >= 2)
    for (std::size_t a = 0; a < 6; ++a) {
      s = 0.0;
      for (const Jet& c : f) s += c.h[a] * c.h[a];
      out.push_back(std::sqrt(s) * std::pow(rho, 2.0 + q));
    }
  return out;
}

// Integral (or sup) over the shell [r0, r1], Gauss rule in log r.
inline double shell_value(const FieldSampler& f, int k, double p, double q, double r0,
                          double r1, const SphereGrid& G, int npts) {
  std::vector<double> t, w;
  gauss_legendre(npts, t, w);
  const double a = std::log(r0), b = std::log(r1);
  const bool sup = std::isinf(p);
  std::vector<double> acc(static_cast<std::size_t>(npts), 0.0);
  parallel_for(static_cast<std::size_t>(npts), [&](std::size_t i) {
    const double r = std::exp(0.5 * (a + b) + 0.5 * (b - a) * t[i]);
    std::vector<double> ang(G.size());
    double m = 0.0;
    for (std::size_t n = 0; n < G.size(); ++n) {
      const auto terms = weighted_terms(f(r * G.nodes[n]), r * G.nodes[n], k, q);
      if (sup) {
        m = std::max(m, *std::max_element(terms.begin(), terms.end()));
      } else {
        double s = 0.0;
        for (double v : terms) s += std::pow(v, p);
        ang[n] = s;
      }
    }
    // dx rho^-3 = r^2 dr dw r^-3 = dt dw with t = log r
    acc[i] = sup ? m : 0.5 * (b - a) * w[i] * integrate(G, ang);
  });
  if (sup) return *std::max_element(acc.begin(), acc.end());
  return pairwise_sum(acc);
}

}  // namespace detail

/// Weighted Sobolev norm of W^{k,p}_{-q} over an annulus. An infinite outer
/// radius is summed over doubling shells; a tail whose shell contributions
/// stop decreasing raises DivergenceError with the partial sums.
inline WeightedNorm weighted_sobolev_norm(const FieldSampler& f, int k, double p, double q,
                                          Annulus ann, const SobolevSettings& s = {}) {
  if (k < 0 || k > 2)
    throw ConfigError("weighted Sobolev order k must be 0, 1 or 2 (got " + std::to_string(k) + ")");
  if (!(p >= 1.0)) throw ConfigError("weighted Sobolev exponent p must be >= 1 or infinity");
  if (!(ann.inner > 0.0) || !(ann.outer > ann.inner))
    throw InputError("annulus needs 0 < inner < outer");
  const GridPtr grid = build_grid(std::max(4, s.lmax));
  const bool sup = std::isinf(p);
  WeightedNorm out;
  auto finish = [&](double v) {
    out.integral = v;
    out.norm = sup ? v : std::pow(v, 1.0 / p);
    return out;
  };
  if (std::isfinite(ann.outer)) {
    double r0 = ann.inner, total = 0.0;
    while (r0 < ann.outer) {
      const double r1 = std::min(2.0 * r0, ann.outer);
      const double v = detail::shell_value(f, k, p, q, r0, r1, *grid, s.radial_points);
      total = sup ? std::max(total, v) : total + v;
      ++out.shells;
      r0 = r1;
    }
    return finish(total);
  }
  std::vector<double> partial, shell;
  double r0 = ann.inner, total = 0.0;
  for (int j = 0; j < s.max_shells; ++j, r0 *= 2.0) {
    const double v = detail::shell_value(f, k, p, q, r0, 2.0 * r0, *grid, s.radial_points);
    total = sup ? std::max(total, v) : total + v;
    shell.push_back(v);
    partial.push_back(total);
    out.shells = j + 1;
    const std::size_t n = shell.size();
    if (n >= 4) {
      const bool decreasing = shell[n - 1] < shell[n - 2] && shell[n - 2] < shell[n - 3];
      const double ratio = shell[n - 2] > 0.0 ? shell[n - 1] / shell[n - 2] : 0.0;
      const double tail = sup ? shell[n - 1] : (ratio < 1.0 ? shell[n - 1] * ratio / (1.0 - ratio) : 0.0);
      if (shell[n - 1] == 0.0 && shell[n - 2] == 0.0) return finish(total);
      if (decreasing && tail <= 1e-13 * std::max(total, 1e-300)) {
        if (!sup) total += tail;
        return finish(total);
      }
      if (n >= 8) {
        bool stalled = true;
        for (std::size_t i = n - 4; i < n; ++i)
          if (shell[i - 1] > 0.0 && shell[i] < 0.999 * shell[i - 1]) stalled = false;
        if (stalled)
          throw DivergenceError("weighted norm diverges on [" + std::to_string(ann.inner) +
                                    ", inf): shell contributions do not decrease",
                                partial);
      }
    }
  }
  throw DivergenceError("weighted norm tail did not converge within " +
                            std::to_string(s.max_shells) + " doubling shells",
                        partial);
}

/// Components h_ij (i <= j) of g_a - g_b as jets.
inline FieldSampler metric_difference_sampler(const DataFamily& a, const DataFamily& b) {
  return [a, b](const Vec3& x) {
    const MetricJet ja = metric_at(a, x), jb = metric_at(b, x);
    std::vector<Jet> out;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i; j < 3; ++j) {
        Jet c(ja.g[i][j] - jb.g[i][j]);
        for (std::size_t k = 0; k < 3; ++k) {
          c.d[k] = ja.dg[i][j][k] - jb.dg[i][j][k];
          for (std::size_t l = k; l < 3; ++l)
            c.h[sym_index(k, l)] = ja.ddg[i][j][k][l] - jb.ddg[i][j][k][l];
        }
        out.push_back(c);
      }
    return out;
  };
}

/// Components of the additive term eps * profile of a perturbed family,
/// evaluated directly so that tails far below the metric's rounding level
/// keep their relative accuracy.
inline FieldSampler perturbation_sampler(const DataFamily& family) {
  const auto* p = std::get_if<Perturbed>(&family.kind);
  if (!p) throw InputError("perturbation sampler needs a perturbed family");
  return [prof = p->profile, eps = p->eps, q = family.q, R0 = family.R0](const Vec3& x) {
    const detail::SymJet s = detail::profile_metric(prof, coordinate_jets(x), q, R0);
    std::vector<Jet> out;
    for (const Jet& c : s) out.push_back(eps * c);
    return out;
  };
}

/// Components pi_ij (i <= j) of pi_a - pi_b as jets (first partials only).
inline FieldSampler momentum_difference_sampler(const DataFamily& a, const DataFamily& b) {
  return [a, b](const Vec3& x) {
    const MomentumJet ja = momentum_at(a, x), jb = momentum_at(b, x);
    std::vector<Jet> out;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i; j < 3; ++j) {
        Jet c(ja.pi[i][j] - jb.pi[i][j]);
        for (std::size_t k = 0; k < 3; ++k) c.d[k] = ja.dpi[i][j][k] - jb.dpi[i][j][k];
        out.push_back(c);
      }
    return out;
  };
}

/// Odd (sign = -1) or even (sign = +1) part (f(x) + sign f(-x)) / 2 of a
/// sampled field, with its derivatives.
inline FieldSampler parity_part(FieldSampler f, double sign) {
  return [f = std::move(f), sign](const Vec3& x) {
    auto a = f(x);
    const auto b = f(-x);
    for (std::size_t c = 0; c < a.size(); ++c) {
      // For F(x) = f(-x): F' = -f'(-x), F'' = f''(-x).
      a[c].v = 0.5 * (a[c].v + sign * b[c].v);
      for (std::size_t k = 0; k < 3; ++k) a[c].d[k] = 0.5 * (a[c].d[k] - sign * b[c].d[k]);
      for (std::size_t k = 0; k < 6; ++k) a[c].h[k] = 0.5 * (a[c].h[k] + sign * b[c].h[k]);
    }
    return a;
  };
}

}  // namespace asymflat
