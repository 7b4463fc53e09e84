#pragma once

#include <string>

#include "asymflat/core/errors.hpp"
#include "asymflat/spectral/transform.hpp"

namespace asymflat {

enum class L1Policy { Reject, ProjectOut };

inline constexpr double kDefaultKernelTol = 1e-9;

/// Solves (Delta_0 + 2/R^2) psi = rhs on the sphere of radius R, where
/// Delta_0 is the Laplacian of the round metric of radius R. The l = 1
/// block is the kernel: under Reject a block norm above kernel_tol throws
/// KernelObstruction carrying (a11, a1-1, a10); otherwise it is dropped.
/// The l = 1 block of the result is always zero.
inline HarmonicCoefficients helmholtz_solve(const HarmonicCoefficients& rhs,
                                            double R, L1Policy policy,
                                            double kernel_tol = kDefaultKernelTol) {
  if (!(R > 0.0)) throw InputError("Helmholtz radius must be positive");
  if (policy == L1Policy::Reject && rhs.lmax >= 1) {
    const Vec3 k = l1_block(rhs);
    if (norm(k) > kernel_tol)
      throw KernelObstruction("right-hand side has l = 1 content of norm " +
                                  std::to_string(norm(k)) +
                                  " above kernel tolerance",
                              k);
  }
  HarmonicCoefficients out(rhs.lmax);
  for (int l = 0; l <= rhs.lmax; ++l) {
    if (l == 1) continue;
    const double eig = (2.0 - l * (l + 1.0)) / (R * R);
    for (int m = -l; m <= l; ++m) out.at(l, m) = rhs.at(l, m) / eig;
  }
  return out;
}

/// Applies (Delta_0 + 2/R^2) in coefficient space.
inline HarmonicCoefficients helmholtz_apply(const HarmonicCoefficients& psi, double R) {
  HarmonicCoefficients out(psi.lmax);
  for (int l = 0; l <= psi.lmax; ++l) {
    const double eig = (2.0 - l * (l + 1.0)) / (R * R);
    for (int m = -l; m <= l; ++m) out.at(l, m) = eig * psi.at(l, m);
  }
  return out;
}

}  // namespace asymflat
