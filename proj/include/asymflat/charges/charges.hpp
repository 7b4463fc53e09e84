#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "asymflat/charges/extrapolation.hpp"
#include "asymflat/charges/flux.hpp"
#include "asymflat/core/errors.hpp"
#include "asymflat/initial_data/parity.hpp"
#include "asymflat/spectral/grid.hpp"

namespace asymflat {

struct ChargeSettings {
  int lmax = 16;
  bool force_rt = false;       // report C and J even when the parity check fails
  double mass_floor = 1e-10;   // |m| below this cannot normalize C, J, C_I
};

struct ScalarCharge {
  std::vector<double> radii;
  std::vector<double> per_radius;
  Extrapolation limit;
};

struct VectorCharge {
  std::vector<double> radii;
  std::vector<Vec3> per_radius;
  std::array<Extrapolation, 3> limit;

  Vec3 value() const { return {limit[0].value, limit[1].value, limit[2].value}; }
  double error() const {
    return std::max({limit[0].error, limit[1].error, limit[2].error});
  }
};

inline ScalarCharge make_scalar_charge(std::vector<double> radii, std::vector<double> v) {
  ScalarCharge c{std::move(radii), std::move(v), {}};
  c.limit = extrapolate(c.radii, c.per_radius);
  return c;
}

inline VectorCharge make_vector_charge(std::vector<double> radii, std::vector<Vec3> v) {
  VectorCharge c{std::move(radii), std::move(v), {}};
  for (std::size_t l = 0; l < 3; ++l) {
    std::vector<double> comp(c.per_radius.size());
    for (std::size_t k = 0; k < comp.size(); ++k) comp[k] = c.per_radius[k][l];
    c.limit[l] = extrapolate(c.radii, comp);
  }
  return c;
}

/// Successive differences |C(r_k+1) - C(r_k)|. The sequence is flagged
/// non-Cauchy when the last difference is no smaller than the first and is
/// above the floor.
struct CauchyDiagnostic {
  std::vector<double> differences;
  bool non_cauchy = false;
};

inline CauchyDiagnostic cauchy_diagnostic(const std::vector<Vec3>& v, double floor) {
  CauchyDiagnostic d;
  for (std::size_t k = 1; k < v.size(); ++k) d.differences.push_back(norm(v[k] - v[k - 1]));
  if (d.differences.size() >= 2)
    d.non_cauchy = d.differences.back() > floor &&
                   d.differences.back() >= d.differences.front();
  return d;
}

/// Empirical parity test: decay of the odd part of g and the even part of pi
/// over radii r_lo * {1, 2, 4, 8, 16}, sampled at the nodes of a small grid.
struct RTCheck {
  std::vector<double> radii;
  std::vector<double> odd_metric;  // max node/component |g^odd|
  std::vector<double> even_momentum;
  double odd_metric_exponent = 0.0;
  double even_momentum_exponent = 0.0;
  bool odd_metric_vanishes = false;
  bool even_momentum_vanishes = false;
  bool momentum_checked = false;
  double q = 1.0;
  bool satisfied = true;
  std::string message;
};

inline RTCheck rt_check(const DataFamily& family, double r_lo) {
  constexpr double slack = 0.2, zero = 1e-15;
  RTCheck c;
  c.q = family.q;
  c.momentum_checked = provides_momentum(family);
  const GridPtr grid = build_grid(6);
  for (double f : {1.0, 2.0, 4.0, 8.0, 16.0}) c.radii.push_back(r_lo * f);
  c.odd_metric.resize(c.radii.size());
  c.even_momentum.resize(c.radii.size());
  parallel_for(c.radii.size(), [&](std::size_t i) {
    double go = 0.0, pe = 0.0;
    for (const Vec3& w : grid->nodes) {
      const Vec3 x = c.radii[i] * w;
      const Mat3 a = metric_at(family, x).g, b = metric_at(family, -x).g;
      for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t q = 0; q < 3; ++q) go = std::max(go, 0.5 * std::abs(a[p][q] - b[p][q]));
      if (c.momentum_checked) {
        const Mat3 pa = momentum_at(family, x).pi, pb = momentum_at(family, -x).pi;
        for (std::size_t p = 0; p < 3; ++p)
          for (std::size_t q = 0; q < 3; ++q)
            pe = std::max(pe, 0.5 * std::abs(pa[p][q] + pb[p][q]));
      }
    }
    c.odd_metric[i] = go;
    c.even_momentum[i] = pe;
  });
  auto exponent = [&](const std::vector<double>& v, bool& vanishes) {
    vanishes = std::all_of(v.begin(), v.end(), [&](double x) { return x <= zero; });
    if (vanishes) return -std::numeric_limits<double>::infinity();
    std::vector<double> w(v);
    for (double& x : w) x = std::max(x, zero);
    return decay_exponent_fit(c.radii, w).exponent;
  };
  c.odd_metric_exponent = exponent(c.odd_metric, c.odd_metric_vanishes);
  const bool g_ok = c.odd_metric_vanishes || c.odd_metric_exponent <= -(1.0 + c.q) + slack;
  bool pi_ok = true;
  if (c.momentum_checked) {
    c.even_momentum_exponent = exponent(c.even_momentum, c.even_momentum_vanishes);
    pi_ok = c.even_momentum_vanishes || c.even_momentum_exponent <= -(2.0 + c.q) + slack;
  } else {
    c.even_momentum_vanishes = true;
  }
  c.satisfied = g_ok && pi_ok;
  if (!g_ok)
    c.message += "odd part of g decays like r^" + std::to_string(c.odd_metric_exponent) +
                 ", slower than r^-(1+q) = r^" + std::to_string(-(1.0 + c.q)) + ". ";
  if (!pi_ok)
    c.message += "even part of pi decays like r^" + std::to_string(c.even_momentum_exponent) +
                 ", slower than r^-(2+q) = r^" + std::to_string(-(2.0 + c.q)) + ". ";
  return c;
}

namespace detail {
inline void require_mass(double m, const ChargeSettings& s, const std::string& what) {
  if (!(std::abs(m) > s.mass_floor))
    throw NormalizationError(what + " is undefined: the mass " + std::to_string(m) +
                             " is zero to within " + std::to_string(s.mass_floor));
}

inline void require_rt(const RTCheck& rt, const ChargeSettings& s, const std::string& what) {
  if (!rt.satisfied && !s.force_rt)
    throw ParityViolation(what + " refused: parity condition fails. " + rt.message +
                          "Pass the force flag to compute it anyway.");
}

inline std::vector<SphereFluxes> fluxes(const DataFamily& family, const RadiusSchedule& sched,
                                        const ChargeSettings& s, bool momentum, bool curvature) {
  validate_schedule(sched, family.R0);
  return schedule_fluxes(family, build_grid(s.lmax), sched.radii, momentum, curvature);
}
}  // namespace detail

inline ScalarCharge adm_mass(const DataFamily& family, const RadiusSchedule& sched,
                             const ChargeSettings& s = {}) {
  const auto f = detail::fluxes(family, sched, s, false, false);
  std::vector<double> v;
  for (const auto& x : f) v.push_back(x.mass);
  return make_scalar_charge(sched.radii, v);
}

inline VectorCharge linear_momentum(const DataFamily& family, const RadiusSchedule& sched,
                                    const ChargeSettings& s = {}) {
  if (!provides_momentum(family))
    throw CapabilityError("linear momentum needs a momentum tensor; family '" +
                          family_name(family) + "' is metric only");
  const auto f = detail::fluxes(family, sched, s, true, false);
  std::vector<Vec3> v;
  for (const auto& x : f) v.push_back(x.momentum);
  return make_vector_charge(sched.radii, v);
}

struct CenterResult {
  VectorCharge center;
  double mass = 0.0;
  RTCheck rt;
  bool forced = false;  // computed although the parity check failed
  CauchyDiagnostic cauchy;
};

inline CenterResult center_of_mass_hamiltonian(const DataFamily& family,
                                               const RadiusSchedule& sched,
                                               const ChargeSettings& s = {}) {
  validate_schedule(sched, family.R0);
  CenterResult out;
  out.rt = rt_check(family, sched.radii.front());
  detail::require_rt(out.rt, s, "center of mass");
  out.forced = !out.rt.satisfied;
  const auto f = detail::fluxes(family, sched, s, false, false);
  std::vector<double> mv;
  for (const auto& x : f) mv.push_back(x.mass);
  out.mass = extrapolate(sched.radii, mv).value;
  detail::require_mass(out.mass, s, "center of mass");
  std::vector<Vec3> v;
  for (const auto& x : f) v.push_back(x.center_moment / out.mass);
  out.center = make_vector_charge(sched.radii, v);
  out.cauchy = cauchy_diagnostic(v, 1e-8 * std::max(1.0, norm(v.back())));
  return out;
}

struct AngularMomentumResult {
  VectorCharge J;
  double mass = 0.0;
  RTCheck rt;
  bool forced = false;
};

inline AngularMomentumResult angular_momentum(const DataFamily& family,
                                              const RadiusSchedule& sched,
                                              const ChargeSettings& s = {}) {
  if (!provides_momentum(family))
    throw CapabilityError("angular momentum needs a momentum tensor; family '" +
                          family_name(family) + "' is metric only");
  validate_schedule(sched, family.R0);
  AngularMomentumResult out;
  out.rt = rt_check(family, sched.radii.front());
  detail::require_rt(out.rt, s, "angular momentum");
  out.forced = !out.rt.satisfied;
  const auto f = detail::fluxes(family, sched, s, true, false);
  std::vector<double> mv;
  for (const auto& x : f) mv.push_back(x.mass);
  out.mass = extrapolate(sched.radii, mv).value;
  detail::require_mass(out.mass, s, "angular momentum");
  std::vector<Vec3> v;
  for (const auto& x : f) v.push_back(x.angular_moment / out.mass);
  out.J = make_vector_charge(sched.radii, v);
  return out;
}

struct IntrinsicMassResult {
  ScalarCharge exact;  // exact nu_g and d sigma_g
  ScalarCharge flat;   // x/r and d sigma_0
};

inline IntrinsicMassResult intrinsic_mass(const DataFamily& family, const RadiusSchedule& sched,
                                          const ChargeSettings& s = {}) {
  const auto f = detail::fluxes(family, sched, s, false, true);
  std::vector<double> a, b;
  for (const auto& x : f) {
    a.push_back(x.intrinsic_mass);
    b.push_back(x.intrinsic_mass_flat);
  }
  return {make_scalar_charge(sched.radii, a), make_scalar_charge(sched.radii, b)};
}

/// Numerical checks of the surface-sequence conditions for intrinsic center
/// integrals: inradius growth, bounded area / inradius^2 and sub-cubic growth
/// of the volume of the region where S and -S disagree.
struct Admissibility {
  std::vector<double> inradius;
  std::vector<double> area_ratio;    // area_g / inradius^2
  std::vector<double> asym_volume;   // vol(Omega sym-diff -Omega) / inradius^3
  bool ok = true;
  std::string violated;
};

namespace detail {

// Distance from the origin to the surface along the unit direction w.
inline double origin_radius(const RadialGraphSurface& s, const Vec3& w) {
  double t = s.R + norm(s.p);
  for (int it = 0; it < 200; ++it) {
    const Vec3 d = t * w - s.p;
    const double f = norm(d) - s.radius_along(d / norm(d));
    t -= f;
    if (std::abs(f) <= 1e-13 * t) break;
  }
  return t;
}

}  // namespace detail

inline Admissibility check_admissibility(const std::vector<RadialGraphSurface>& surfaces,
                                         const std::vector<double>& areas) {
  Admissibility a;
  for (std::size_t k = 0; k < surfaces.size(); ++k) {
    const RadialGraphSurface& s = surfaces[k];
    const SphereGrid& G = *s.grid;
    std::vector<double> rho(G.size()), rho_m(G.size());
    double inr = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < G.size(); ++i) {
      rho[i] = detail::origin_radius(s, G.nodes[i]);
      rho_m[i] = detail::origin_radius(s, -G.nodes[i]);
      inr = std::min(inr, rho[i]);
    }
    std::vector<double> t(G.size());
    for (std::size_t i = 0; i < t.size(); ++i)
      t[i] = std::abs(std::pow(rho[i], 3) - std::pow(rho_m[i], 3)) / 3.0;
    a.inradius.push_back(inr);
    a.area_ratio.push_back(areas[k] / (inr * inr));
    a.asym_volume.push_back(integrate(G, t) / (inr * inr * inr));
  }
  auto fail = [&](const std::string& why) {
    if (a.ok) a.violated = why;
    a.ok = false;
  };
  for (std::size_t k = 1; k < a.inradius.size(); ++k)
    if (!(a.inradius[k] > a.inradius[k - 1])) fail("inradius is not increasing");
  const auto [amin, amax] = std::minmax_element(a.area_ratio.begin(), a.area_ratio.end());
  if (!a.area_ratio.empty() && *amax > 2.0 * *amin)
    fail("area / inradius^2 is not bounded along the sequence");
  const double v0 = a.asym_volume.front(), v1 = a.asym_volume.back();
  if (v1 > 1e-12 && v1 > v0 * (1.0 + 1e-9))
    fail("asymmetric volume grows at least cubically in the inradius");
  return a;
}

struct IntrinsicCenterResult {
  VectorCharge exact;  // abscissa: inradius
  VectorCharge flat;
  Admissibility admissibility;
  double mass = 0.0;
};

/// C_I over a sequence of closed surfaces ordered outward.
inline IntrinsicCenterResult intrinsic_center(const DataFamily& family,
                                              const std::vector<RadialGraphSurface>& surfaces,
                                              double mass, const ChargeSettings& s = {}) {
  detail::require_mass(mass, s, "intrinsic center");
  if (surfaces.size() < 4) throw InputError("intrinsic center needs at least 4 surfaces");
  IntrinsicCenterResult out;
  out.mass = mass;
  std::vector<IntrinsicMoments> mom(surfaces.size());
  std::vector<double> areas(surfaces.size());
  for (std::size_t k = 0; k < surfaces.size(); ++k) {
    const SurfaceGeometry geo = compute_geometry(surfaces[k], family);
    mom[k] = intrinsic_moments(geo);
    areas[k] = area_and_centroid(geo).area_g;
  }
  out.admissibility = check_admissibility(surfaces, areas);
  if (!out.admissibility.ok)
    throw AdmissibilityError("surface sequence is not admissible: " +
                             out.admissibility.violated);
  std::vector<Vec3> a, b;
  for (const auto& m : mom) {
    a.push_back(m.center / mass);
    b.push_back(m.center_flat / mass);
  }
  out.exact = make_vector_charge(out.admissibility.inradius, a);
  out.flat = make_vector_charge(out.admissibility.inradius, b);
  return out;
}

/// Coordinate spheres |x| = r for every radius of the schedule.
inline std::vector<RadialGraphSurface> coordinate_spheres(const RadiusSchedule& sched,
                                                          const GridPtr& grid) {
  std::vector<RadialGraphSurface> out;
  for (double r : sched.radii) out.push_back(make_sphere(grid, {}, r));
  return out;
}

/// Every charge the family supports over one schedule, sharing the fluxes.
struct ChargeReport {
  std::vector<double> radii;
  int lmax = 0;
  ScalarCharge m;
  std::optional<VectorCharge> P;
  std::optional<VectorCharge> C;
  std::optional<VectorCharge> J;
  ScalarCharge m_I;
  ScalarCharge m_I_flat;
  std::optional<VectorCharge> C_I;
  std::optional<VectorCharge> C_I_flat;
  RTCheck rt;
  CauchyDiagnostic center_cauchy;
  std::vector<std::string> notes;  // reasons for absent charges
};

inline ChargeReport compute_charges(const DataFamily& family, const RadiusSchedule& sched,
                                    const ChargeSettings& s = {}) {
  validate_schedule(sched, family.R0);
  ChargeReport r;
  r.radii = sched.radii;
  r.lmax = s.lmax;
  const bool mom = provides_momentum(family);
  const auto f = detail::fluxes(family, sched, s, mom, true);
  const std::size_t n = f.size();
  std::vector<double> m(n), mi(n), mif(n);
  std::vector<Vec3> P(n), cm(n), jm(n), ci(n), cif(n);
  for (std::size_t k = 0; k < n; ++k) {
    m[k] = f[k].mass;
    mi[k] = f[k].intrinsic_mass;
    mif[k] = f[k].intrinsic_mass_flat;
    P[k] = f[k].momentum;
    cm[k] = f[k].center_moment;
    jm[k] = f[k].angular_moment;
    ci[k] = f[k].intrinsic_moment;
    cif[k] = f[k].intrinsic_moment_flat;
  }
  r.m = make_scalar_charge(sched.radii, m);
  r.m_I = make_scalar_charge(sched.radii, mi);
  r.m_I_flat = make_scalar_charge(sched.radii, mif);
  if (mom)
    r.P = make_vector_charge(sched.radii, P);
  else
    r.notes.push_back("P, J: family provides no momentum tensor");
  r.rt = rt_check(family, sched.radii.front());
  const double mass = r.m.limit.value;
  if (!(std::abs(mass) > s.mass_floor)) {
    r.notes.push_back("C, J, C_I: mass is zero, the 1/m normalization is undefined");
    return r;
  }
  auto scaled = [&](const std::vector<Vec3>& v) {
    std::vector<Vec3> o(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) o[k] = v[k] / mass;
    return o;
  };
  r.C_I = make_vector_charge(sched.radii, scaled(ci));
  r.C_I_flat = make_vector_charge(sched.radii, scaled(cif));
  if (!r.rt.satisfied && !s.force_rt) {
    r.notes.push_back("C, J refused: parity condition fails. " + r.rt.message);
    return r;
  }
  const auto c = scaled(cm);
  r.C = make_vector_charge(sched.radii, c);
  r.center_cauchy = cauchy_diagnostic(c, 1e-8 * std::max(1.0, norm(c.back())));
  if (mom) r.J = make_vector_charge(sched.radii, scaled(jm));
  return r;
}

}  // namespace asymflat
