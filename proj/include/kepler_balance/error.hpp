#pragma once

#include <stdexcept>
#include <string>

namespace kb {

/// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (t outside (0,1), f <= 0, a < 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The object cannot provide what was asked (derivative order, closed form, n != 2, ...).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// A requested moment integral diverges.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int first_finite_k)
      : Error(what), first_finite_k_(first_finite_k) {}
  int first_finite_k() const noexcept { return first_finite_k_; }

 private:
  int first_finite_k_;
};

/// A truncated series is too short for the requested order.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Series inversion or fractional power of a series without unit leading coefficient.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// An iterative computation exhausted its budget (term cap, quadrature level, Newton steps).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Extrapolation or fit did not stabilise.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// ODE integration failed (step-size underflow, invariant drift).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Input object is not in the state the operation requires.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration (CLI flags, profile specs, grids).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kb
