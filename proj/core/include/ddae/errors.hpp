#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ddae {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent matrix shapes or invalid scalar arguments.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Failures that stem from the numerics of the system rather than from
/// malformed input. The CLI maps these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// E11 numerically singular: the rank decision and the partition disagree.
class DecompositionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A characteristic or torus matrix is singular at the evaluation point.
/// `where` holds the frequency (one entry) or the torus point.
class EvaluationError : public NumericalError {
 public:
  EvaluationError(const std::string& what, std::vector<double> where)
      : NumericalError(what), where_(std::move(where)) {}
  const std::vector<double>& where() const noexcept { return where_; }

 private:
  std::vector<double> where_;
};

/// Characteristic root on the imaginary axis detected while scanning.
class InstabilityError : public NumericalError {
 public:
  InstabilityError(const std::string& what, double omega)
      : NumericalError(what), omega_(omega) {}
  double omega() const noexcept { return omega_; }

 private:
  double omega_;
};

/// The torus function is singular somewhere: the strong norm of T_a is
/// infinite.
class UnboundedNormError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// No finite frequency cap exists because the difference part is not
/// strongly stable.
class AsymptoticDominanceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An iterative method hit its iteration budget.
class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ddae
