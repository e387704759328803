#pragma once

// Double-exponential quadrature for weighted radial integrals
//   ∫₀^∞ r^p f(r) dr,   p > -1,
// with tanh-sinh on (0, split] and exp-sinh on [split, ∞).

#include <functional>
#include <optional>
#include <vector>

namespace cknlab::quadrature {

struct QuadratureSpec {
  double rel_tol = 1e-12;
  int max_level = 12;
  double split_point = 1.0;

  /// rel_tol in (1e-15, 1e-3), max_level in [4, 16], split_point > 0.
  void validate() const;
};

/// The integrand decays like exp(-c r^q) at infinity.
struct DecayHint {
  double c = 1.0;
  double q = 1.0;
};

struct IntegrandHandle {
  std::function<double(double)> evaluator;  // f(r), must be finite on (0, ∞)
  double weight_exponent = 0.0;             // p
  std::optional<DecayHint> decay_hint;
  /// When set together with a decay hint, evaluator returns f(r) exp(c r^q);
  /// the decay factor is applied in log space by the integrator. This keeps
  /// integrands whose mass sits at huge r from underflowing.
  bool decay_factored = false;
  /// The returned value (and error estimate) is exp(-log_scale) ∫ r^p f.
  double log_scale = 0.0;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double err_est = 0.0;
  int levels = 0;       // refinement levels used (level 0 is the coarse grid)
  int evaluations = 0;  // integrand calls
  std::vector<double> level_values;
};

/// ∫₀^∞ r^p f(r) dr. Stops when two successive levels agree within rel_tol
/// (at least three levels are always computed). Throws NonConvergenceError
/// (carrying the last estimate) when max_level is exhausted and an
/// Error(non_finite_sample) when f returns inf or nan at a node.
QuadratureResult integrate(const IntegrandHandle& h, const QuadratureSpec& spec = {});

/// ∫_lo^∞ r^p f(r) dr for lo > 0, exp-sinh only.
QuadratureResult integrate_from(const IntegrandHandle& h, double lo,
                                const QuadratureSpec& spec = {});

}  // namespace cknlab::quadrature
