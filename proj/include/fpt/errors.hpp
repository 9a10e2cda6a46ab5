#pragma once

#include <stdexcept>
#include <string>

namespace fpt {

/// Argument outside the mathematical domain of an operation (branch cuts,
/// singular points, nonpositive parameters).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation not available for the requested model or route.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature did not reach the requested accuracy. Carries the residual
/// estimate so callers can decide whether to retry with a finer rule.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Non-finite intermediate or violated numerical invariant.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed inconsistent inputs (shape mismatch, out-of-grid point).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace fpt
