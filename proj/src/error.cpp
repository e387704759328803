#include "cknlab/error.hpp"

#include <cmath>
#include <sstream>

#include "cknlab/params.hpp"

namespace cknlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::unsupported_regime: return "unsupported-regime";
    case ErrorKind::zero_denominator: return "zero-denominator";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::non_finite_sample: return "non-finite-sample";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::io: return "io";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain:
    case ErrorKind::overflow:
    case ErrorKind::divergence:
    case ErrorKind::unsupported_regime:
    case ErrorKind::zero_denominator:
      return 2;
    case ErrorKind::non_convergence:
    case ErrorKind::non_finite_sample:
      return 3;
    case ErrorKind::consistency:
      return 4;
    case ErrorKind::io:
      return 5;
    case ErrorKind::usage:
      return 1;
  }
  return 1;
}

void InequalityParams::validate() const {
  if (N < 1) fail(ErrorKind::domain, "dimension N must be >= 1, got " + std::to_string(N));
  if (!std::isfinite(alpha)) fail(ErrorKind::domain, "alpha must be finite");
  if (beta && !std::isfinite(*beta)) fail(ErrorKind::domain, "beta must be finite");
}

bool InequalityParams::weighted_case_holds() const {
  return N >= 2 && alpha > -1.0 && static_cast<double>(N) >= 5.0 * alpha + 5.0;
}

std::string InequalityParams::describe() const {
  std::ostringstream os;
  os << "N=" << N << ", alpha=" << alpha;
  if (beta) os << ", beta=" << *beta;
  return os.str();
}

}  // namespace cknlab
