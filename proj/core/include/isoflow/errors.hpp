#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isoflow {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of incompatible shape.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the input values does not hold (bad n, tol <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Floating-point failure: non-finite values, zero pivots, lost symmetry,
/// eigensolver or fixed-point non-convergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Fixed-point stage solve did not converge; callers may retry with a
/// smaller step.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, int iterations)
      : NumericalError(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

/// Failure while stepping a trajectory; carries the failing step index.
class StepError : public NumericalError {
 public:
  StepError(const std::string& what, std::size_t step)
      : NumericalError(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Malformed input file (matrix text, cache file).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario configuration or command-line override.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace isoflow
