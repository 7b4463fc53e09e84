#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "asymflat/charges/charges.hpp"
#include "asymflat/charges/sobolev.hpp"
#include "asymflat/initial_data/parity.hpp"

namespace asymflat {

struct ContinuityRow {
  double eps = 0.0;
  double metric_norm = 0.0;  // ||g - g_k|| in W^{2,2}_{-q} over [R0, r_max]
  double odd_norm = 0.0;     // ||(g - g_k)^odd|| in W^{2,2}_{-1-q} over [R0, inf); inf if divergent
  double dm = 0.0, dP = 0.0, dC = 0.0, dJ = 0.0;
  bool center_defined = true;  // C_k extrapolates (per-radius values are Cauchy)
};

struct ContinuityResult {
  std::vector<ContinuityRow> rows;
  bool rt_bound = true;       // odd-part norm finite for every eps
  double mass_slope = 0.0;    // log-log slope of |m - m_k| against eps
  bool converged = false;     // all differences shrink linearly in eps
  std::string status;         // "converged", "expected-fail" or "failed"
  std::string detail;
};

/// Charges of base + eps_k * profile against those of base. Differences of
/// P, C, J are Euclidean norms; C and J are computed with the parity check
/// forced so that divergence shows up in the data instead of a refusal.
inline ContinuityResult charge_continuity_experiment(const DataFamily& base, Profile profile,
                                                     const std::vector<double>& eps,
                                                     const RadiusSchedule& sched,
                                                     ChargeSettings s = {}) {
  s.force_rt = true;
  if (eps.empty()) throw InputError("continuity experiment needs an eps sequence");
  const ChargeReport ref = compute_charges(base, sched, s);
  if (!ref.C) throw InputError("continuity experiment needs a base family with a center");
  ContinuityResult out;
  const double rmax = sched.radii.back();
  for (double e : eps) {
    ContinuityRow row;
    row.eps = e;
    const DataFamily fam = make_perturbed(base, e, profile);
    const FieldSampler diff = perturbation_sampler(fam);
    row.metric_norm = weighted_sobolev_norm(diff, 2, 2.0, fam.q, {fam.R0, rmax}).norm;
    try {
      row.odd_norm = weighted_sobolev_norm(parity_part(diff, -1.0), 2, 2.0, 1.0 + fam.q,
                                           {fam.R0, std::numeric_limits<double>::infinity()})
                         .norm;
    } catch (const DivergenceError&) {
      row.odd_norm = std::numeric_limits<double>::infinity();
      out.rt_bound = false;
    }
    const ChargeReport rep = compute_charges(fam, sched, s);
    row.dm = std::abs(rep.m.limit.value - ref.m.limit.value);
    if (rep.P && ref.P) row.dP = norm(rep.P->value() - ref.P->value());
    row.center_defined = !rep.center_cauchy.non_cauchy;
    row.dC = row.center_defined ? norm(rep.C->value() - ref.C->value())
                                : std::numeric_limits<double>::infinity();
    if (rep.J && ref.J) row.dJ = norm(rep.J->value() - ref.J->value());
    out.rows.push_back(row);
  }

  // Linear-in-eps checks over the nonzero eps values.
  std::vector<double> e, dm;
  bool bounded = true;
  std::vector<const ContinuityRow*> nz;
  for (const auto& r : out.rows)
    if (r.eps != 0.0) nz.push_back(&r);
  std::sort(nz.begin(), nz.end(), [](auto a, auto b) { return a->eps > b->eps; });
  for (const auto* r : nz) {
    e.push_back(r->eps);
    dm.push_back(r->dm);
  }
  for (const auto& r : out.rows)
    if (r.eps == 0.0 && (r.dm != 0.0 || r.dP != 0.0 || r.dC != 0.0 || r.dJ != 0.0)) bounded = false;
  auto linear = [&](auto get) {
    // d_k / eps_k stays within a factor 4 and d_k decreases with eps_k.
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < nz.size(); ++i) {
      const double d = get(*nz[i]);
      if (!std::isfinite(d)) return false;
      if (i > 0 && d > get(*nz[i - 1]) * (1.0 + 1e-9) + 1e-12) return false;
      if (d <= 1e-12) continue;
      lo = std::min(lo, d / nz[i]->eps);
      hi = std::max(hi, d / nz[i]->eps);
    }
    return hi <= 4.0 * lo || hi == 0.0;
  };
  if (e.size() >= 4) {
    std::vector<double> pos_e, pos_d;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (dm[i] > 0.0) {
        pos_e.push_back(e[i]);
        pos_d.push_back(dm[i]);
      }
    if (pos_e.size() >= 4) out.mass_slope = decay_exponent_fit(pos_e, pos_d).exponent;
  }
  const bool mass_ok = linear([](const ContinuityRow& r) { return r.dm; }) &&
                       std::abs(out.mass_slope - 1.0) <= 0.1;
  const bool p_ok = linear([](const ContinuityRow& r) { return r.dP; });
  const bool c_ok = linear([](const ContinuityRow& r) { return r.dC; });
  const bool j_ok = linear([](const ContinuityRow& r) { return r.dJ; });
  out.converged = bounded && mass_ok && p_ok && c_ok && j_ok;
  if (out.converged) {
    out.status = "converged";
  } else if (!out.rt_bound) {
    out.status = "expected-fail";
    out.detail = "odd part violates the parity bound; center differences are not controlled";
  } else {
    out.status = "failed";
  }
  if (!out.converged) {
    if (!mass_ok) out.detail += " mass differences not linear in eps;";
    if (!p_ok) out.detail += " momentum differences not linear in eps;";
    if (!c_ok) out.detail += " center differences not linear in eps;";
    if (!j_ok) out.detail += " angular momentum differences not linear in eps;";
  }
  return out;
}

struct TransformComparison {
  std::string name;
  Vec3 expected{};
  Vec3 actual{};
  double tolerance = 0.0;
  bool asserted = true;  // false for recorded diagnostics
  bool pass = true;
};

struct TransformReport {
  std::vector<TransformComparison> comparisons;
  bool pass = true;
};

/// Recomputes the charges in the chart y = O x + a and compares them with the
/// transformation law: m and m_I invariant, P -> O P, C and C_I -> O C + a and
/// J -> O J when a = 0. With a != 0 the J comparison is a diagnostic only.
inline TransformReport coordinate_transform_check(const DataFamily& family, const Mat3& O,
                                                  const Vec3& a, const RadiusSchedule& sched,
                                                  const ChargeSettings& s = {},
                                                  double rel_tol = 1e-4) {
  const DataFamily moved = make_rigid_motion(family, O, a);
  RadiusSchedule sched_y = sched;
  for (double& r : sched_y.radii) r += norm(a);
  const ChargeReport x = compute_charges(family, sched, s);
  const ChargeReport y = compute_charges(moved, sched_y, s);
  TransformReport out;
  auto add = [&](std::string name, Vec3 want, Vec3 got, double err, bool asserted) {
    TransformComparison c{std::move(name), want, got, 0.0, asserted, true};
    c.tolerance = rel_tol * std::max(1.0, norm(want)) + err;
    c.pass = norm(got - want) <= c.tolerance;
    if (asserted && !c.pass) out.pass = false;
    out.comparisons.push_back(c);
  };
  add("m", {x.m.limit.value, 0, 0}, {y.m.limit.value, 0, 0}, x.m.limit.error + y.m.limit.error,
      true);
  add("m_I", {x.m_I.limit.value, 0, 0}, {y.m_I.limit.value, 0, 0},
      x.m_I.limit.error + y.m_I.limit.error, true);
  if (x.P && y.P) add("P", O * x.P->value(), y.P->value(), x.P->error() + y.P->error(), true);
  if (x.C && y.C)
    add("C", O * x.C->value() + a, y.C->value(), x.C->error() + y.C->error(), true);
  if (x.C_I && y.C_I)
    add("C_I", O * x.C_I->value() + a, y.C_I->value(), x.C_I->error() + y.C_I->error(), true);
  if (x.J && y.J)
    add("J", O * x.J->value(), y.J->value(), x.J->error() + y.J->error(), norm(a) == 0.0);
  return out;
}

}  // namespace asymflat
