#pragma once

// Exponential-polynomial series  f(r) = exp(-b r^q) Σ c_i r^{e_i}  with
// closed-form products against power weights.

#include <limits>
#include <optional>
#include <vector>

namespace cknlab {

struct ExpPolyTerm {
  double coef = 0.0;
  double exponent = 0.0;
};

/// A signed number stored as sign * exp(log_abs); sign is 0 for zero.
struct LogValue {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static LogValue from(double x);
  double value() const;  // may overflow to ±inf or underflow to 0
  LogValue operator+(const LogValue& o) const;
  LogValue operator*(double c) const;
};

class ExpPolySeries {
 public:
  ExpPolySeries() = default;
  /// Terms with equal exponents are merged, zero coefficients dropped.
  ExpPolySeries(double rate, double q, std::vector<ExpPolyTerm> terms);

  double rate() const { return rate_; }
  double decay_q() const { return q_; }
  const std::vector<ExpPolyTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  double min_exponent() const;

  double operator()(double r) const;
  /// Σ c_i r^{e_i - shift}, the series without its exponential factor.
  double cofactor(double r, double shift) const;

  ExpPolySeries derivative() const;
  /// r -> f(lambda r).
  ExpPolySeries dilated(double lambda) const;
  ExpPolySeries scaled(double c) const;

  /// The g with g' = f and g(∞) = 0, when every term has (e+1)/q a positive
  /// integer (then it is again an exponential-polynomial series).
  std::optional<ExpPolySeries> antiderivative_from_infinity() const;

 private:
  double rate_ = 1.0;
  double q_ = 1.0;
  std::vector<ExpPolyTerm> terms_;
};

/// ∫₀^∞ r^w f(r) g(r) dr in closed form (Gamma functions, log space).
/// f and g must share the decay exponent q. Throws a divergence error naming
/// the offending exponent when some term pair is not integrable at 0.
LogValue weighted_product_integral(const ExpPolySeries& f, const ExpPolySeries& g, double w);

}  // namespace cknlab
