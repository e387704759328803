#pragma once

// Closed-form sharp constants and the per-mode lower-bound quotients
//   J(N,k)   = (N+2k-3)^4 (N+2k+1)^2 / (4 [(N+2k-3)^2 + 4k]^2)
//   K(N,a,k) = (N+2k-a-3)^4 (N+2k+3a+1)^2 / (4 [(N+2k-a-3)^2 + 4(a+1)k]^2)
// together with their infimum over the mode index k.
//
// Every formula here is evaluated in exact rational arithmetic (a finite
// double is an exact dyadic rational) and rounded once at the end.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cknlab/params.hpp"

namespace cknlab::constants {

using Rational = boost::multiprecision::cpp_rational;

Rational to_rational(double x);
double to_double(const Rational& r);
std::string to_string(const Rational& r);  // "3969/676", "4", "-3/2"

enum class Formula { J, K, DnGeneral };
const char* to_string(Formula f);
Formula parse_formula(const std::string& s);

struct ModeQuotient {
  int k = 0;
  double value = 0.0;
  Rational exact;
  Formula formula = Formula::J;
  InequalityParams params;
};

Rational exact_mode_quotient_J(int N, int k);
Rational exact_mode_quotient_K(const InequalityParams& params, int k);

ModeQuotient mode_quotient_J(int N, int k);
ModeQuotient mode_quotient_K(const InequalityParams& params, int k);

/// Continuous extension F(x) of K(N,a,.) with x = 2k, i.e. K(N,a,k) = F(2k).
/// At a = 0 this is the function f(x) used for J.
double continuous_extension(const InequalityParams& params, double x);

struct ModeInfimum {
  ModeQuotient minimum;
  int argmin = 0;
  std::vector<ModeQuotient> scanned;  // k = 0..k_max
  bool hypotheses_hold = false;       // monotone-tail argument applies
  bool tail_verified = false;         // hypotheses hold and sampled increments are >= 0
  double worst_tail_increment = 0.0;  // min over the grid of F(x+h)-F(x) (relative)
};

/// Minimum over k in {0..k_max} of the chosen formula. For DnGeneral this is
/// the general (alpha, beta) lower-bound display (beta from params, default 0).
ModeInfimum mode_infimum(Formula formula, const InequalityParams& params, int k_max = 64);

/// Samples F(x+h) >= F(x) - 1e-12 |F(x)| for x in [2, 200] on a grid with step h.
/// Returns the smallest relative increment seen.
double sampled_tail_increment(const InequalityParams& params, double x_lo = 2.0,
                              double x_hi = 200.0, double h = 0.1);

/// C(N, alpha) of the weighted inequality (beta = 0):
///   alpha^2/4             N = 1, -1 < alpha <= -1/2
///   (3 alpha + 2)^2 / 4    N = 1, alpha > -1/2
///   (N + 3 alpha + 1)^2/4  N >= 2, alpha > -1, N >= 5 alpha + 5
/// Throws unsupported_regime otherwise, naming the failed condition.
double sharp_constant_closed_form(const InequalityParams& params);
Rational exact_sharp_constant(const InequalityParams& params);

struct BoundsReport {
  double lower = 0.0;
  double upper = 0.0;
  double conjectured = 0.0;
  Rational exact_lower, exact_upper, exact_conjectured;
  bool conjecture_open = false;  // N = 4: the upper bound is the radial value
  int N = 0;
};

/// Two-sided bounds on the unweighted constant C(N) for N in {2, 3}
///   (N-1)^4 (N+3)^2 / (4 (N^2-2N+5)^2) <= C(N) <= N (N+4)(N^2-1)^2 / (4 (N^2-N+4)^2)
/// and the radial bracket [J(4,1), 25/4] for N = 4.
BoundsReport symmetry_breaking_bounds(int N);

/// N (N+4)(N^2-1)^2 / (4 (N^2-N+4)^2): quotient of |x| e^{-|x|} times a degree-one harmonic.
Rational exact_test_function_value(int N);

struct ReferenceConstant {
  std::string name;
  std::optional<double> value;
  bool precondition_met = true;
  std::string note;
};

/// Closed-form constants of the neighbouring first- and second-order
/// inequalities, keyed by a descriptive name.
std::map<std::string, ReferenceConstant> reference_constants(const InequalityParams& params);

struct DnConditions {
  std::vector<std::string> failed;
  bool ok() const { return failed.empty(); }
};
DnConditions check_dn_conditions(const InequalityParams& params);

/// Per-mode term of the general lower bound for C(N, alpha, beta).
Rational exact_dn_term(const InequalityParams& params, int k);

/// inf over k in {0..k_max} of the general lower-bound display.
double dn_general_lower_bound(const InequalityParams& params, int k_max = 64);

// Pieces of the monotonicity argument for J on x >= 2 (2 <= N <= 4):
//   f(x) = g(x) h(x) with D(x) = x^2 + 2(N-2)x + (N-3)^2,
//   g = (N+x+1)^2 / (4 D^{1/4}),  h = (N+x-3)^4 / D^{7/4}.
namespace monotone {
double f(int N, double x);
double g(int N, double x);
double h(int N, double x);
double g_prime(int N, double x);  // closed form
double h_prime(int N, double x);  // closed form
/// Quadratic factors whose positivity on x >= 2 gives g' > 0 and h' > 0.
double g_prime_factor(int N, double x);
double h_prime_factor(int N, double x);

// Two-variable form used for K: G(x, t) with t = N + x - a - 3.
double G(double alpha, double x, double t);
double dG_dx(double alpha, double x, double t);
double dG_dt(double alpha, double x, double t);
/// Lower bound (t + 4a + 4) t^4 (t + 2a + 2)(t - 4a - 4) / (2 [t^2 + 2(a+1)x]^3) for F'(x).
double F_prime_lower_bound(double alpha, double x, double t);

/// K(N,a,1) >= K(N,a,0) in the variable y = N - a - 1:
///   y^4 (y + 4a + 4)^2 >= (y + 4a + 2)^2 (y^2 + 4a + 4)^2      (quartic form)
///   y^2 >= 2(a+1) y + 4(a+1)(2a+1)                              (reduced form)
/// Each returns lhs - rhs.
double first_mode_quartic_gap(double alpha, double y);
double first_mode_reduced_gap(double alpha, double y);
}  // namespace monotone

}  // namespace cknlab::constants
