#pragma once

#include <stdexcept>
#include <string>

namespace admmcert {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A scalar parameter (step size, weight, proximal coefficient) is out of range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A linear system is singular, ill-conditioned or otherwise unusable.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Misuse of an API (wrong variant, wrong trace kind, non-consecutive states).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure exhausted its budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace admmcert
