#pragma once

#include <stdexcept>
#include <string>

namespace cknlab {

enum class ErrorKind {
  domain,              // argument outside the formula's domain
  overflow,            // result not representable as a finite double
  divergence,          // integral does not converge for the given exponents
  unsupported_regime,  // no closed-form case applies
  zero_denominator,
  non_convergence,
  non_finite_sample,   // integrand returned inf/nan at a node
  consistency,         // two computation routes disagree
  io,
  usage,
};

const char* to_string(ErrorKind kind);

/// Process exit code associated with an error kind (0 is success).
///   2 precondition violation, 3 numerical non-convergence,
///   4 internal consistency failure, 5 I/O, 1 usage.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thrown by iterative numerics that ran out of refinement budget. Carries the
/// last available estimate so callers can still report it.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double value, double err_est)
      : Error(ErrorKind::non_convergence, what), value_(value), err_est_(err_est) {}

  double value() const noexcept { return value_; }
  double err_est() const noexcept { return err_est_; }

 private:
  double value_;
  double err_est_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace cknlab
