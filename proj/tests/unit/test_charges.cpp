#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "asymflat/charges/charges.hpp"
#include "asymflat/charges/experiments.hpp"
#include "asymflat/charges/extrapolation.hpp"
#include "asymflat/charges/identities.hpp"
#include "asymflat/charges/killing.hpp"
#include "asymflat/charges/sobolev.hpp"
#include "oracles/moments.hpp"

using namespace asymflat;
constexpr double kPi = std::numbers::pi;

namespace {

RadiusSchedule schedule() { return geometric_schedule(100.0, 2.0, 6); }

HarmonicAsymptotics shifted(double A, Vec3 kappa, Mat3 D = {}) {
  HarmonicAsymptotics h;
  h.monopole = A;
  h.shift_monopole = kappa;
  h.shift_dipole = D;
  return h;
}

Mat3 curl_dipole() { return Mat3{{{{0.0, -0.4, 0.1}, {0.4, 0.0, -0.3}, {-0.1, 0.3, 0.0}}}}; }

}  // namespace

TEST(Extrapolation, RecoversPowerLawLimit) {
  std::vector<double> r, v;
  for (double x = 50; x <= 800; x *= 2) {
    r.push_back(x);
    v.push_back(2.5 - 3.0 * std::pow(x, -1.3));
  }
  const auto e = extrapolate(r, v);
  EXPECT_NEAR(e.value, 2.5, 1e-10);
  EXPECT_NEAR(e.exponent, 1.3, 1e-4);
  EXPECT_GE(e.error, 0.0);
}

TEST(Extrapolation, ConstantSeriesHasZeroError) {
  const auto e = extrapolate({1, 2, 4, 8, 16}, {3, 3, 3, 3, 3});
  EXPECT_EQ(e.value, 3.0);
  EXPECT_EQ(e.error, 0.0);
}

TEST(Extrapolation, RejectsShortOrUnorderedSchedules) {
  EXPECT_THROW(extrapolate({1, 2, 3}, {1, 1, 1}), InputError);
  EXPECT_THROW(validate_schedule({{10, 20, 15, 40}}, 1.0), ConfigError);
  EXPECT_THROW(validate_schedule({{10, 20, 30, 40}}, 15.0), DomainError);
}

TEST(Killing, RotationFieldsAreTangentToCenteredSpheres) {
  const Vec3 x{1.3, -0.7, 2.9};
  for (int p = 0; p < 3; ++p) EXPECT_EQ(dot(rotation(p)(x), x), 0.0);
  // Y_(l) = |x|^2 e_l - 2 x^l x
  const Vec3 y = boost_conformal(1)(x);
  EXPECT_DOUBLE_EQ(y[1], dot(x, x) - 2 * x[1] * x[1]);
  EXPECT_DOUBLE_EQ(y[0], -2 * x[1] * x[0]);
}

TEST(Mass, FlatIsZero) {
  const auto m = adm_mass(make_flat(), schedule());
  for (double v : m.per_radius) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(m.limit.value, 0.0);
}

TEST(Mass, SchwarzschildPerRadiusClosedForm) {
  // m(r) = m u(r)^3 for g = u^4 delta.
  const auto m = adm_mass(make_schwarzschild(1.0), schedule());
  for (std::size_t k = 0; k < m.radii.size(); ++k)
    EXPECT_NEAR(m.per_radius[k], std::pow(1 + 0.5 / m.radii[k], 3), 1e-12);
}

TEST(Mass, SchwarzschildExtrapolatesToOne) {
  const auto m = adm_mass(make_schwarzschild(1.0), geometric_schedule(200, 2, 5));
  EXPECT_NEAR(m.limit.value, 1.0, 1e-6);
  EXPECT_LE(m.limit.error, 1e-5);
}

TEST(Mass, HarmonicMonopoleIsTwiceA) {
  HarmonicAsymptotics h;
  h.monopole = 0.7;
  h.dipole = {0.4, 0.2, -0.3};
  const auto m = adm_mass(make_harmonic(h), geometric_schedule(200, 2, 5));
  EXPECT_NEAR(m.limit.value, 1.4, 1.4e-5);
}

TEST(Mass, TranslatedSchwarzschildIsInvariant) {
  const auto m = adm_mass(make_schwarzschild(1.0, {3, -2, 5}), geometric_schedule(200, 2, 5));
  EXPECT_NEAR(m.limit.value, 1.0, 1e-5);
}

TEST(Momentum, ZeroForTimeSymmetricData) {
  const auto P = linear_momentum(make_schwarzschild(1.0), schedule());
  EXPECT_EQ(norm(P.value()), 0.0);
}

TEST(Momentum, LinearInShiftMonopole) {
  const Vec3 k{0.2, -0.1, 0.3};
  const auto P1 = linear_momentum(make_harmonic(shifted(0.0, k)), schedule());
  const auto P2 = linear_momentum(make_harmonic(shifted(0.0, 2.0 * k)), schedule());
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t r = 0; r < P1.radii.size(); ++r)
      EXPECT_NEAR(P2.per_radius[r][l], 2 * P1.per_radius[r][l], 1e-8);
    EXPECT_NEAR(P2.value()[l], 2 * P1.value()[l], 1e-8);
  }
  EXPECT_GT(norm(P1.value()), 1e-3);
}

TEST(Momentum, AgreesUnderGridRefinement) {
  HarmonicAsymptotics h = shifted(0.5, {0.1, 0.2, -0.15}, curl_dipole());
  h.dipole = {0.3, -0.2, 0.6};
  const auto fam = make_harmonic(h);
  ChargeSettings lo, hi;
  lo.lmax = 12;
  hi.lmax = 24;
  const auto a = linear_momentum(fam, schedule(), lo), b = linear_momentum(fam, schedule(), hi);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(a.value()[l], b.value()[l], 1e-6);
}

TEST(Momentum, MetricOnlyFamilyIsRefused) {
  EXPECT_THROW(linear_momentum(make_kerr(1.0, 0.5), schedule()), CapabilityError);
}

TEST(Center, CenteredSchwarzschildIsZero) {
  const auto c = center_of_mass_hamiltonian(make_schwarzschild(1.0), schedule());
  EXPECT_LE(norm(c.center.value()), 1e-10);
  EXPECT_TRUE(c.rt.satisfied);
}

TEST(Center, TranslatedSchwarzschild) {
  const Vec3 c0{3, -2, 5};
  const auto c = center_of_mass_hamiltonian(make_schwarzschild(1.0, c0), schedule());
  EXPECT_LE(norm(c.center.value() - c0), 1e-4);
  EXPECT_FALSE(c.cauchy.non_cauchy);
}

TEST(Center, HarmonicDipoleOverMonopole) {
  HarmonicAsymptotics h;
  h.monopole = 0.5;
  h.dipole = {1.0, -0.5, 0.8};
  const auto c = center_of_mass_hamiltonian(make_harmonic(h), schedule());
  EXPECT_LE(norm(c.center.value() - h.dipole / h.monopole), 1e-4);
}

TEST(Center, FlatIsNotNormalizable) {
  EXPECT_THROW(center_of_mass_hamiltonian(make_flat(), schedule()), NormalizationError);
}

TEST(Center, ParityViolationRefusedUnlessForced) {
  const auto fam = make_rt_violating(0.7, 1.0, {0, 0, 1});
  EXPECT_THROW(center_of_mass_hamiltonian(fam, schedule()), ParityViolation);
  ChargeSettings s;
  s.force_rt = true;
  const auto c = center_of_mass_hamiltonian(fam, schedule(), s);
  EXPECT_TRUE(c.forced);
  EXPECT_TRUE(c.cauchy.non_cauchy);
  const auto m = adm_mass(fam, schedule());
  EXPECT_LE(m.limit.error, 1e-4);
  EXPECT_NEAR(m.limit.value, 1.0, 1e-4);
}

TEST(RTCheck, KerrAndHarmonicSatisfy) {
  EXPECT_TRUE(rt_check(make_kerr(1.0, 0.6), 100).satisfied);
  HarmonicAsymptotics h = shifted(0.5, {0.1, 0.2, -0.15}, curl_dipole());
  h.dipole = {0.3, -0.2, 0.6};
  const auto c = rt_check(make_harmonic(h), 100);
  EXPECT_TRUE(c.satisfied) << c.message;
  EXPECT_NEAR(c.odd_metric_exponent, -2.0, 0.1);
}

TEST(AngularMomentum, ZeroForTimeSymmetricData) {
  const auto J = angular_momentum(make_schwarzschild(1.0), schedule());
  EXPECT_EQ(norm(J.J.value()), 0.0);
}

TEST(AngularMomentum, AgreesUnderGridRefinement) {
  const auto fam = make_harmonic(shifted(0.5, {}, curl_dipole()));
  ChargeSettings lo, hi;
  lo.lmax = 12;
  hi.lmax = 24;
  const auto a = angular_momentum(fam, schedule(), lo), b = angular_momentum(fam, schedule(), hi);
  EXPECT_GT(norm(a.J.value()), 1e-3);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(a.J.value()[l], b.J.value()[l], 1e-6);
}

TEST(AngularMomentum, RotationEquivariant) {
  const auto fam = make_harmonic(shifted(0.5, {0.1, 0.0, 0.2}, curl_dipole()));
  const Mat3 O = rotation_about({0.3, -1.0, 0.5}, 1.1);
  const auto a = angular_momentum(fam, schedule());
  const auto b = angular_momentum(make_rigid_motion(fam, O, {}), schedule());
  const Vec3 want = O * a.J.value();
  for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(b.J.value()[l], want[l], 1e-8);
}

TEST(IntrinsicMass, SchwarzschildMatchesMass) {
  const auto sched = geometric_schedule(200, 2, 5);
  const auto mi = intrinsic_mass(make_schwarzschild(1.0), sched);
  EXPECT_NEAR(mi.exact.limit.value, 1.0, 1e-4);
  EXPECT_NEAR(mi.flat.limit.value, 1.0, 1e-4);
}

TEST(IntrinsicMass, FlatIsZero) {
  const auto mi = intrinsic_mass(make_flat(), schedule());
  EXPECT_EQ(mi.exact.limit.value, 0.0);
}

TEST(IntrinsicMass, AgreesWithAdmMassOnCatalog) {
  HarmonicAsymptotics h;
  h.monopole = 0.7;
  h.dipole = {0.4, 0.2, -0.3};
  h.quadrupole = Mat3{{{{0.5, 0.1, 0.0}, {0.1, -0.2, 0.3}, {0.0, 0.3, -0.3}}}};
  const auto sched = geometric_schedule(200, 2, 5);
  for (const auto& fam : {make_schwarzschild(2.0, {1, 0, -1}), make_harmonic(h), make_kerr(1.0, 0.7)}) {
    const auto r = compute_charges(fam, sched);
    EXPECT_LE(std::abs(r.m_I.limit.value - r.m.limit.value),
              std::max(r.m_I.limit.error + r.m.limit.error, 1e-4 * r.m.limit.value))
        << family_name(fam);
  }
}

TEST(IntrinsicCenter, TranslatedSchwarzschildSpheres) {
  const Vec3 c0{3, -2, 5};
  const auto fam = make_schwarzschild(1.0, c0);
  const auto spheres = coordinate_spheres(schedule(), build_grid(16));
  const auto r = intrinsic_center(fam, spheres, 1.0);
  EXPECT_LE(norm(r.exact.value() - c0), 1e-3);
  EXPECT_LE(norm(r.flat.value() - c0), 1e-3);
}

TEST(IntrinsicCenter, EllipsoidsGiveTheSphericalValue) {
  const Vec3 c0{3, -2, 5};
  const auto fam = make_schwarzschild(1.0, c0);
  const auto grid = build_grid(32);
  std::vector<RadialGraphSurface> ell;
  for (double r : schedule().radii) ell.push_back(make_ellipsoid(grid, {}, {r, 1.1 * r, 1.2 * r}));
  const auto a = intrinsic_center(fam, coordinate_spheres(schedule(), grid), 1.0);
  const auto b = intrinsic_center(fam, ell, 1.0);
  EXPECT_TRUE(b.admissibility.ok);
  EXPECT_LE(norm(a.exact.value() - b.exact.value()),
            std::max(a.exact.error() + b.exact.error(), 1e-3));
}

TEST(IntrinsicCenter, Refusals) {
  const auto grid = build_grid(8);
  EXPECT_THROW(intrinsic_center(make_flat(), coordinate_spheres(schedule(), grid), 0.0),
               NormalizationError);
  auto shrinking = coordinate_spheres(schedule(), grid);
  std::swap(shrinking[1], shrinking[2]);
  try {
    intrinsic_center(make_schwarzschild(1.0), shrinking, 1.0);
    FAIL() << "expected an admissibility error";
  } catch (const AdmissibilityError& e) {
    EXPECT_NE(std::string(e.what()).find("inradius"), std::string::npos);
  }
}

TEST(CenterIdentity, FlatIsZero) {
  const auto r = center_identity_residual(make_flat(), build_grid(12), {1, 2, 3}, 50, 0.0, {});
  EXPECT_LE(norm(r), 1e-9);
}

TEST(CenterIdentity, ResidualDecaysOnSchwarzschild) {
  const auto grid = build_grid(16);
  const auto fam = make_schwarzschild(1.0);
  std::vector<double> radii, res;
  for (double R = 50; R <= 800; R *= 2) {
    radii.push_back(R);
    res.push_back(norm(center_identity_residual(fam, grid, {2, 0, 0}, R, 1.0, {})));
  }
  EXPECT_LE(decay_exponent_fit(radii, res).exponent, 1 - 2 * fam.q + 0.2);
}

TEST(CenterIdentity, LhsVanishesAtTheCenter) {
  HarmonicAsymptotics h;
  h.monopole = 0.5;
  h.dipole = {1.0, -0.5, 0.8};
  h.quadrupole = Mat3{{{{0.6, 0.2, 0.0}, {0.2, -0.2, 0.1}, {0.0, 0.1, -0.4}}}};
  const auto fam = make_harmonic(h);
  const Vec3 C = h.dipole / h.monopole;
  const auto grid = build_grid(16);
  const double a = norm(center_identity_lhs(fam, grid, C, 100));
  const double b = norm(center_identity_lhs(fam, grid, C, 800));
  EXPECT_LT(b, a / 4);
  EXPECT_LE(b, 1e-2);
}

TEST(Sobolev, ZeroField) {
  const FieldSampler zero = [](const Vec3&) { return std::vector<Jet>{Jet(0.0)}; };
  EXPECT_EQ(weighted_sobolev_norm(zero, 2, 2.0, 1.0, {10, 100}).integral, 0.0);
}

FieldSampler power_field(double s) {
  return [s](const Vec3& x) {
    const Vec3Jet X = coordinate_jets(x);
    return std::vector<Jet>{pow(sqrt(dot(X, X)), -s)};
  };
}

TEST(Sobolev, PowerLawMatchesRadialIntegral) {
  for (double s : {0.5, 1.0, 2.3}) {
    const double q = 0.8;
    const double got = weighted_sobolev_norm(power_field(s), 0, 2.0, q, {3, 500}).integral;
    const double want = oracle::weighted_power_integral(q, s, 3, 500);
    EXPECT_LE(std::abs(got - want), 1e-8 * want) << s;
  }
}

TEST(Sobolev, InfiniteAnnulusConvergesOnlyAboveTheWeight) {
  const double q = 0.8;
  const auto fin = weighted_sobolev_norm(power_field(1.5), 0, 2.0, q,
                                         {2, std::numeric_limits<double>::infinity()});
  EXPECT_NEAR(fin.integral, 4 * kPi * std::pow(2.0, 2 * (q - 1.5)) / (2 * (1.5 - q)), 1e-8);
  EXPECT_THROW(weighted_sobolev_norm(power_field(q), 0, 2.0, q,
                                     {2, std::numeric_limits<double>::infinity()}),
               DivergenceError);
}

TEST(Sobolev, DerivativeTermsAndSupNorm) {
  const double s = 1.2, q = 0.7;
  const auto k0 = weighted_sobolev_norm(power_field(s), 0, 2.0, q, {5, 80}).integral;
  const auto k1 = weighted_sobolev_norm(power_field(s), 1, 2.0, q, {5, 80}).integral;
  // sum_a (d_a r^-s)^2 r^2(1+q) integrates like s^2 r^-2s r^2q: same radial law.
  EXPECT_NEAR(k1, k0 * (1 + s * s), 1e-8 * k1);
  const auto sup = weighted_sobolev_norm(power_field(s), 0, std::numeric_limits<double>::infinity(),
                                         q, {5, 80});
  EXPECT_NEAR(sup.norm, std::pow(5.0, q - s), 1e-2 * std::pow(5.0, q - s));
  EXPECT_LE(sup.norm, std::pow(5.0, q - s));
  EXPECT_THROW(weighted_sobolev_norm(power_field(s), 3, 2.0, q, {5, 80}), ConfigError);
}

TEST(Continuity, EvenPerturbationConvergesLinearly) {
  const auto base = make_schwarzschild(1.0, {}, 0.9, 5.0);
  std::vector<double> eps{0.0};
  for (int k = 0; k <= 6; ++k) eps.push_back(std::ldexp(1.0, -k));
  const auto r = charge_continuity_experiment(base, Profile::MassDipole, eps,
                                              geometric_schedule(100, 2, 5));
  EXPECT_EQ(r.status, "converged") << r.detail;
  EXPECT_NEAR(r.mass_slope, 1.0, 0.1);
  EXPECT_EQ(r.rows.front().dm, 0.0);
  EXPECT_TRUE(r.rt_bound);
}

TEST(Continuity, OddPerturbationIsExpectedFail) {
  const auto base = make_schwarzschild(1.0, {}, 0.9, 5.0);
  const auto r = charge_continuity_experiment(base, Profile::OddPower, {1.0, 0.5, 0.25, 0.125},
                                              geometric_schedule(100, 2, 5));
  EXPECT_FALSE(r.rt_bound);
  EXPECT_EQ(r.status, "expected-fail");
  for (const auto& row : r.rows) {
    EXPECT_FALSE(row.center_defined);
    EXPECT_LE(row.dm, 1e-3);
  }
}

TEST(Transform, IdentityLeavesChargesUnchanged) {
  const auto rep = coordinate_transform_check(make_schwarzschild(1.0, {3, -2, 5}),
                                              Mat3::identity(), {}, schedule());
  EXPECT_TRUE(rep.pass);
  for (const auto& c : rep.comparisons) EXPECT_LE(norm(c.actual - c.expected), 1e-10) << c.name;
}

TEST(Transform, QuarterTurnAboutZ) {
  const auto rep = coordinate_transform_check(make_schwarzschild(1.0, {3, 0, 0}),
                                              rotation_about({0, 0, 1}, kPi / 2), {}, schedule());
  EXPECT_TRUE(rep.pass);
  for (const auto& c : rep.comparisons)
    if (c.name == "C") {
      EXPECT_NEAR(c.actual[0], 0.0, 1e-4);
      EXPECT_NEAR(c.actual[1], 3.0, 1e-4);
    }
}

TEST(Transform, TranslationShiftsCenters) {
  HarmonicAsymptotics h = shifted(0.5, {0.1, 0.2, -0.15}, curl_dipole());
  h.dipole = {0.3, -0.2, 0.6};
  const auto rep =
      coordinate_transform_check(make_harmonic(h), rotation_about({1, 1, 0}, 0.4), {0, 0, 7}, schedule());
  EXPECT_TRUE(rep.pass);
  bool saw_j = false;
  for (const auto& c : rep.comparisons) {
    EXPECT_TRUE(c.pass || !c.asserted) << c.name;
    if (c.name == "J") saw_j = !c.asserted;
  }
  EXPECT_TRUE(saw_j);
  EXPECT_THROW(coordinate_transform_check(make_flat(), Mat3{{{{1, 0, 0}, {0, 2, 0}, {0, 0, 1}}}}, {},
                                          schedule()),
               InputError);
}
