#pragma once

#include <stdexcept>
#include <string>

namespace cmbo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of the function (e.g. zeta(s) for s <= 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed argument that is not a domain issue (nonpositive tolerance, h = 0, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition or operator contract was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent experiment description (incommensurate grids, bad JSON fields, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Internal invariant that should hold for any valid input failed.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure of a time integration: non-finite values or particle collision.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time)
      : Error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Neighbouring particles met or crossed: m + G_m r <= 0 for some window.
class CollisionError : public BlowUpError {
 public:
  using BlowUpError::BlowUpError;
};

}  // namespace cmbo
