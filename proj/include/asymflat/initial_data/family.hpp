#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <variant>

#include "asymflat/core/errors.hpp"
#include "asymflat/core/vec.hpp"

namespace asymflat {

struct DataFamily;

/// Euclidean space, g = delta, pi = 0. Global chart.
struct Flat {};

/// Schwarzschild in isotropic coordinates centered at `center`:
/// g = u^4 delta with u = 1 + m / (2 |x - c|), pi = 0.
struct SchwarzschildIsotropic {
  double mass = 1.0;
  Vec3 center{};
};

/// Harmonic asymptotics truncated to low multipoles:
///   u   = 1 + A/r + B.x/r^3 + x.Q.x/r^5,   g  = u^4 delta,
///   X_i = kappa_i/r + D_ij x^j / r^3,      pi = u^2 (L_X delta - (div X) delta).
struct HarmonicAsymptotics {
  double monopole = 0.5;  // A; the mass is 2A
  Vec3 dipole{};          // B; the center of mass is B/A
  Mat3 quadrupole{};      // Q, symmetric
  Vec3 shift_monopole{};  // kappa
  Mat3 shift_dipole{};    // D
};

/// Boyer-Lindquist t = const slice of Kerr written in the spheroidal
/// Cartesian chart x + iy = sqrt(r^2 + a^2) sin(theta) e^{i phi},
/// z = r cos(theta). Metric only: the momentum tensor is not provided.
struct KerrSpatial {
  double mass = 1.0;
  double spin = 0.0;  // a
};

/// Schwarzschild plus an odd l = 1 term decaying like |x|^{-q}:
///   g = u^4 delta + amp chi(|x|) (dir.x/|x|) |x|^{-q} delta.
/// Violates the parity condition for every q < 1.
struct RTViolating {
  double amp = 1.0;
  Vec3 dir{0.0, 0.0, 1.0};
  double mass = 1.0;
};

/// Named additive perturbations h = eps * profile, each switched on by the
/// C^2 cutoff chi that vanishes for |x| < R0 and equals 1 beyond 2 R0.
enum class Profile {
  Quadrupole,   // chi x.Q.x / r^4 delta            (even, O(r^-2))
  Anisotropic,  // chi x.Q.x / r^3 delta            (even, O(r^-1), l = 2)
  MassDipole,   // chi (2mu/r + 2mu b.x/r^3) delta, pi from X = kappa/r + w x x/r^3
  OddPower,     // chi (e_z.x/r) r^{-q} delta       (odd, O(r^-q))
};

struct Perturbed {
  std::shared_ptr<const DataFamily> base;
  double eps = 0.0;
  Profile profile = Profile::Quadrupole;
};

/// Chart change y = O x + a applied to `base`; fields are the pullbacks.
struct RigidMotion {
  std::shared_ptr<const DataFamily> base;
  Mat3 rotation = Mat3::identity();
  Vec3 shift{};
};

using FamilyKind = std::variant<Flat, SchwarzschildIsotropic,
                                HarmonicAsymptotics, KerrSpatial, RTViolating,
                                Perturbed, RigidMotion>;

/// An analytic asymptotically flat initial data set. Immutable; safe to share
/// across threads.
struct DataFamily {
  FamilyKind kind;
  double q = 1.0;   // nominal decay rate
  double R0 = 1.0;  // inner chart radius
};

inline std::string profile_name(Profile p) {
  switch (p) {
    case Profile::Quadrupole: return "quadrupole";
    case Profile::Anisotropic: return "anisotropic";
    case Profile::MassDipole: return "mass_dipole";
    case Profile::OddPower: return "odd_power";
  }
  return "unknown";
}

inline Profile profile_from_name(const std::string& name) {
  if (name == "quadrupole") return Profile::Quadrupole;
  if (name == "anisotropic") return Profile::Anisotropic;
  if (name == "mass_dipole") return Profile::MassDipole;
  if (name == "odd_power") return Profile::OddPower;
  throw ConfigError("unknown perturbation profile '" + name + "'");
}

inline std::string family_name(const DataFamily& f) {
  struct {
    std::string operator()(const Flat&) const { return "flat"; }
    std::string operator()(const SchwarzschildIsotropic&) const {
      return "schwarzschild";
    }
    std::string operator()(const HarmonicAsymptotics&) const {
      return "harmonic";
    }
    std::string operator()(const KerrSpatial&) const { return "kerr"; }
    std::string operator()(const RTViolating&) const { return "rt_violating"; }
    std::string operator()(const Perturbed& p) const {
      return "perturbed(" + family_name(*p.base) + ", " +
             profile_name(p.profile) + ")";
    }
    std::string operator()(const RigidMotion& r) const {
      return "rigid(" + family_name(*r.base) + ")";
    }
  } visitor;
  return std::visit(visitor, f.kind);
}

namespace detail {
inline void check_decay(double q, double R0) {
  if (!(q > 0.5))
    throw ConfigError("decay rate q must satisfy q > 1/2 (got " +
                      std::to_string(q) + ")");
  if (!(R0 > 0.0)) throw ConfigError("inner chart radius R0 must be positive");
}
}  // namespace detail

// Factories validate the invariants of each kind.

inline DataFamily make_flat() { return {Flat{}, 1.0, 1.0}; }

inline DataFamily make_schwarzschild(double mass, Vec3 center = {},
                                     double q = 1.0, double R0 = 1.0) {
  detail::check_decay(q, R0);
  if (!(mass >= 0.0)) throw ConfigError("Schwarzschild mass must be >= 0");
  return {SchwarzschildIsotropic{mass, center}, q, R0};
}

inline DataFamily make_harmonic(const HarmonicAsymptotics& h, double q = 1.0,
                                double R0 = 5.0) {
  detail::check_decay(q, R0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (h.quadrupole[i][j] != h.quadrupole[j][i])
        throw ConfigError("harmonic quadrupole must be symmetric");
  // Sufficient condition for u > 0 on |x| >= R0.
  double qnorm = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) qnorm += h.quadrupole[i][j] * h.quadrupole[i][j];
  const double lower = 1.0 - std::abs(h.monopole) / R0 -
                       norm(h.dipole) / (R0 * R0) -
                       std::sqrt(qnorm) / (R0 * R0 * R0);
  if (!(lower > 0.0))
    throw ConfigError("harmonic conformal factor may vanish on the chart; "
                      "increase R0");
  return {h, q, R0};
}

inline DataFamily make_kerr(double mass, double spin, double R0 = 0.0) {
  if (!(mass >= 0.0)) throw ConfigError("Kerr mass must be >= 0");
  if (std::abs(spin) > mass) throw ConfigError("Kerr requires |a| <= m");
  if (R0 <= 0.0) R0 = 2.0 * mass + std::abs(spin) + 1.0;
  if (!(R0 > 2.0 * mass + std::abs(spin)))
    throw ConfigError("Kerr chart radius must exceed 2m + |a|");
  return {KerrSpatial{mass, spin}, 1.0, R0};
}

inline DataFamily make_rt_violating(double q, double amp, Vec3 dir,
                                    double mass = 1.0, double R0 = 5.0) {
  detail::check_decay(q, R0);
  const double n = norm(dir);
  if (!(n > 0.0)) throw ConfigError("RT-violating direction must be nonzero");
  return {RTViolating{amp, dir / n, mass}, q, R0};
}

inline DataFamily make_perturbed(const DataFamily& base, double eps,
                                 Profile profile, double q = 0.0,
                                 double R0 = 0.0) {
  if (q == 0.0) q = base.q;
  if (R0 == 0.0) R0 = base.R0;
  detail::check_decay(q, R0);
  return {Perturbed{std::make_shared<const DataFamily>(base), eps, profile}, q,
          R0};
}

inline DataFamily make_rigid_motion(const DataFamily& base,
                                    const Mat3& rotation, Vec3 shift) {
  const Mat3 defect = transpose(rotation) * rotation - Mat3::identity();
  double err = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) err = std::max(err, std::abs(defect[i][j]));
  if (err > 1e-12) throw InputError("chart rotation is not orthogonal");
  return {RigidMotion{std::make_shared<const DataFamily>(base), rotation, shift},
          base.q, base.R0 + norm(shift)};
}

}  // namespace asymflat
