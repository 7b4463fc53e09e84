#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "asymflat/core/vec.hpp"

namespace asymflat {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation outside the chart region or at a singular point.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid family parameters, settings, or unknown kinds.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The requested quantity is not provided by this family (never zero-filled).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Malformed inputs: size mismatches, too few samples, bad matrices.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Degenerate metrics, degenerate induced metrics, eigensolver failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Charges carrying a 1/m normalization requested with m ~ 0.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// The l = 1 block of a Helmholtz right-hand side exceeds the kernel
/// tolerance; `component` holds it as a Cartesian 3-vector.
class KernelObstruction : public Error {
 public:
  KernelObstruction(const std::string& what, Vec3 component)
      : Error(what), component_(component) {}
  const Vec3& component() const { return component_; }

 private:
  Vec3 component_;
};

/// Parity (RT) condition rejected by the empirical decay fit.
class ParityViolation : public Error {
 public:
  using Error::Error;
};

/// A surface sequence fails the admissibility conditions for intrinsic
/// center integrals; the message names the violated condition.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

/// A nonlinear iteration stopped contracting. `history` is the residual trace.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace asymflat
