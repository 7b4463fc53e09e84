#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "asymflat/core/errors.hpp"
#include "asymflat/spectral/transform.hpp"
#include "asymflat/surface/geometry.hpp"

namespace asymflat {

/// Galerkin form of L = -Delta_S - (|A|^2 + Ric(nu, nu)) in the real harmonic
/// basis Y_k (k = l^2 + l + m, l <= basis_lmax) pulled back to the surface.
///   stiffness_kl = int gamma^ab d_a Y_k d_b Y_l dsigma_g
///   potential_kl = int (|A|^2 + Ric(nu, nu)) Y_k Y_l dsigma_g
///   mass_kl      = int Y_k Y_l dsigma_g
/// L = stiffness - potential is symmetric by construction; eigenvalues solve
/// L c = lambda mass c.
struct StabilityOperator {
  int basis_lmax = 0;
  Eigen::MatrixXd L;
  Eigen::MatrixXd mass;
  Eigen::VectorXd constant_moment;  // int Y_k dsigma_g
  double assembly_asymmetry = 0.0;  // ||L - L^T|| / ||L|| before symmetrizing
};

namespace detail {

/// Node values and theta/phi partials of every basis function.
struct BasisTable {
  Eigen::MatrixXd Y, Yt, Yp;  // nodes x basis
};

inline BasisTable basis_table(const SphereGrid& grid, int L) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  const Eigen::Index nb = (L + 1) * (L + 1);
  BasisTable b{Eigen::MatrixXd(n, nb), Eigen::MatrixXd(n, nb), Eigen::MatrixXd(n, nb)};
  for (int i = 0; i < grid.n_theta; ++i) {
    const LegendreTable& t = grid.legendre[static_cast<std::size_t>(i)];
    for (int j = 0; j < grid.n_phi; ++j) {
      const Eigen::Index row = static_cast<Eigen::Index>(grid.index(i, j));
      for (int l = 0; l <= L; ++l)
        for (int m = -l; m <= l; ++m) {
          const Eigen::Index col = l * l + l + m;
          const int am = std::abs(m);
          const double co = grid.cos_mphi[static_cast<std::size_t>(am)][static_cast<std::size_t>(j)];
          const double si = grid.sin_mphi[static_cast<std::size_t>(am)][static_cast<std::size_t>(j)];
          double ang = 1.0, dang = 0.0, s = 1.0;
          if (m > 0) {
            s = std::numbers::sqrt2;
            ang = co;
            dang = -am * si;
          } else if (m < 0) {
            s = std::numbers::sqrt2;
            ang = si;
            dang = am * co;
          }
          b.Y(row, col) = s * t.P(l, am) * ang;
          b.Yt(row, col) = s * t.dP(l, am) * ang;
          b.Yp(row, col) = s * t.P(l, am) * dang;
        }
    }
  }
  return b;
}

}  // namespace detail

/// basis_lmax = 0 selects lmax / 2, which keeps every Galerkin integrand
/// within the grid's exactness degree for round spheres.
inline StabilityOperator assemble_stability(const RadialGraphSurface& s,
                                            const SurfaceGeometry& geo,
                                            int basis_lmax = 0) {
  const SphereGrid& grid = *s.grid;
  const int L = basis_lmax > 0 ? basis_lmax : std::max(2, grid.lmax / 2);
  if (L > grid.lmax) throw InputError("stability basis degree exceeds grid lmax");
  const detail::BasisTable b = detail::basis_table(grid, L);
  const Eigen::Index n = b.Y.rows();
  Eigen::VectorXd w(n), wtt(n), wtp(n), wpp(n), wv(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::size_t u = static_cast<std::size_t>(k);
    const double a = geo.area_g[u];
    w(k) = a;
    wtt(k) = a * geo.inverse[u][0];
    wtp(k) = a * geo.inverse[u][1];
    wpp(k) = a * geo.inverse[u][2];
    wv(k) = a * (geo.A2[u] + geo.ric_nn[u]);
  }
  const Eigen::MatrixXd cross = b.Yt.transpose() * wtp.asDiagonal() * b.Yp;
  const Eigen::MatrixXd K = b.Yt.transpose() * wtt.asDiagonal() * b.Yt +
                            cross + cross.transpose() +
                            b.Yp.transpose() * wpp.asDiagonal() * b.Yp;
  const Eigen::MatrixXd V = b.Y.transpose() * wv.asDiagonal() * b.Y;
  StabilityOperator op;
  op.basis_lmax = L;
  op.L = K - V;
  op.assembly_asymmetry = (op.L - op.L.transpose()).norm() / op.L.norm();
  op.L = 0.5 * (op.L + op.L.transpose());
  op.mass = b.Y.transpose() * w.asDiagonal() * b.Y;
  op.mass = 0.5 * (op.mass + op.mass.transpose());
  op.constant_moment = b.Y.transpose() * w;
  return op;
}

namespace detail {
inline std::vector<double> generalized_eigenvalues(const Eigen::MatrixXd& A,
                                                   const Eigen::MatrixXd& B,
                                                   std::size_t k) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      A, B, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw NumericalError("generalized eigensolver failed (dimension " +
                         std::to_string(A.rows()) + ")");
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size() && out.size() < k; ++i)
    out.push_back(es.eigenvalues()(i));
  return out;
}
}  // namespace detail

/// Lowest k generalized eigenvalues, ascending.
inline std::vector<double> lowest_eigenvalues(const StabilityOperator& op, std::size_t k) {
  if (k > static_cast<std::size_t>(op.L.rows()))
    throw InputError("requested more eigenvalues than the basis dimension");
  return detail::generalized_eigenvalues(op.L, op.mass, k);
}

/// Lowest eigenvalue on functions with zero mean against d sigma_g.
inline double lowest_mean_zero_eigenvalue(const StabilityOperator& op) {
  // Orthonormal basis of the complement of the constraint vector.
  const Eigen::Index nb = op.L.rows();
  Eigen::MatrixXd c = op.constant_moment;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
  const Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd Z = Q.rightCols(nb - 1);
  const Eigen::MatrixXd A = Z.transpose() * op.L * Z;
  const Eigen::MatrixXd B = Z.transpose() * op.mass * Z;
  return detail::generalized_eigenvalues(0.5 * (A + A.transpose()),
                                         0.5 * (B + B.transpose()), 1)
      .front();
}

/// c^T L c for coefficients c in the operator's basis.
inline double stability_quadratic_form(const StabilityOperator& op,
                                       const HarmonicCoefficients& c) {
  const HarmonicCoefficients cc = resize(c, op.basis_lmax);
  const Eigen::Map<const Eigen::VectorXd> v(cc.a.data(), static_cast<Eigen::Index>(cc.a.size()));
  return v.dot(op.L * v);
}

/// The same quadratic form evaluated by direct node quadrature of
/// |grad u|^2 - (|A|^2 + Ric(nu, nu)) u^2 against d sigma_g.
inline double stability_quadratic_form_direct(const RadialGraphSurface& s,
                                              const SurfaceGeometry& geo,
                                              const HarmonicCoefficients& c) {
  const SpectralField u = synthesize(*s.grid, c);
  std::vector<double> t(geo.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Sym2& gi = geo.inverse[k];
    const double grad2 = gi[0] * u.f_t[k] * u.f_t[k] + 2.0 * gi[1] * u.f_t[k] * u.f_p[k] +
                         gi[2] * u.f_p[k] * u.f_p[k];
    t[k] = (grad2 - (geo.A2[k] + geo.ric_nn[k]) * u.f[k] * u.f[k]) * geo.area_g[k];
  }
  return pairwise_sum(t);
}

/// Relative Frobenius asymmetry of the assembled operator.
inline double symmetry_defect(const StabilityOperator& op) { return op.assembly_asymmetry; }

}  // namespace asymflat
