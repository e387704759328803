#include "cknlab/constants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cknlab/error.hpp"

namespace cknlab::constants {
namespace {

using boost::multiprecision::cpp_int;

Rational sq(const Rational& x) { return x * x; }

Rational quarter_square(const Rational& x) { return sq(x) / 4; }

void require_mode_index(int k) {
  if (k < 0) fail(ErrorKind::domain, "mode index k must be >= 0, got " + std::to_string(k));
}

}  // namespace

Rational to_rational(double x) {
  if (!std::isfinite(x)) fail(ErrorKind::domain, "cannot convert a non-finite value to a rational");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  const double mant = std::frexp(x, &exp);  // x = mant * 2^exp, 0.5 <= |mant| < 1
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r{cpp_int(scaled)};
  if (exp > 0) {
    r *= Rational(cpp_int(1) << exp);
  } else if (exp < 0) {
    r /= Rational(cpp_int(1) << (-exp));
  }
  return r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
  const cpp_int num = numerator(r);
  const cpp_int den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

const char* to_string(Formula f) {
  switch (f) {
    case Formula::J: return "J";
    case Formula::K: return "K";
    case Formula::DnGeneral: return "DN-general";
  }
  return "?";
}

Formula parse_formula(const std::string& s) {
  if (s == "J" || s == "j") return Formula::J;
  if (s == "K" || s == "k") return Formula::K;
  if (s == "DN" || s == "dn" || s == "DN-general" || s == "dn-general") return Formula::DnGeneral;
  fail(ErrorKind::usage, "unknown formula '" + s + "' (expected J, K or DN)");
}

Rational exact_mode_quotient_J(int N, int k) {
  if (N < 2) fail(ErrorKind::domain, "J(N,k) requires N >= 2, got N=" + std::to_string(N));
  require_mode_index(k);
  // (N-3)^2 + 0 vanishes at N = 3, k = 0; the k = 0 value is the radial
  // constant (N+1)^2/4 for every N.
  if (k == 0) return quarter_square(Rational(N + 1));
  const Rational s(N + 2 * k - 3);
  const Rational den = 4 * sq(sq(s) + 4 * k);
  if (den == 0) fail(ErrorKind::zero_denominator, "J(N,k): vanishing denominator");
  return sq(sq(s)) * sq(Rational(N + 2 * k + 1)) / den;
}

Rational exact_mode_quotient_K(const InequalityParams& params, int k) {
  params.validate();
  if (params.N < 2) fail(ErrorKind::domain, "K(N,alpha,k) requires N >= 2");
  if (!(params.alpha > -1.0)) fail(ErrorKind::domain, "K(N,alpha,k) requires alpha > -1");
  require_mode_index(k);
  // alpha = m / D with D a power of two; everything below is an integer
  // until the single division at the end.
  const Rational a = to_rational(params.alpha);
  const cpp_int m = numerator(a);
  const cpp_int D = denominator(a);
  const cpp_int u = (params.N + 2 * k + 1) * D + 3 * m;
  if (k == 0) return Rational(u * u, 4 * D * D);
  const cpp_int t = (params.N + 2 * k - 3) * D - m;
  const cpp_int t2 = t * t;
  const cpp_int d = t2 + 4 * k * (m + D) * D;
  if (d == 0) fail(ErrorKind::zero_denominator, "K(N,alpha,k): vanishing denominator");
  return Rational(t2 * t2 * u * u, 4 * D * D * d * d);
}

ModeQuotient mode_quotient_J(int N, int k) {
  ModeQuotient q;
  q.k = k;
  q.exact = exact_mode_quotient_J(N, k);
  q.value = to_double(q.exact);
  q.formula = Formula::J;
  q.params = InequalityParams{N, 0.0, std::nullopt};
  return q;
}

ModeQuotient mode_quotient_K(const InequalityParams& params, int k) {
  ModeQuotient q;
  q.k = k;
  q.exact = exact_mode_quotient_K(params, k);
  q.value = to_double(q.exact);
  q.formula = Formula::K;
  q.params = params;
  return q;
}

double continuous_extension(const InequalityParams& params, double x) {
  const double N = params.N;
  const double a = params.alpha;
  const double t = N + x - a - 3.0;
  const double u = N + x + 3.0 * a + 1.0;
  const double d = t * t + 2.0 * (a + 1.0) * x;
  return (t * t * t * t) * (u * u) / (4.0 * d * d);
}

double sampled_tail_increment(const InequalityParams& params, double x_lo, double x_hi, double h) {
  double worst = std::numeric_limits<double>::infinity();
  const int steps = static_cast<int>(std::floor((x_hi - x_lo) / h + 0.5));
  for (int i = 0; i < steps; ++i) {
    const double x = x_lo + i * h;
    const double fx = continuous_extension(params, x);
    const double fxh = continuous_extension(params, x + h);
    worst = std::min(worst, (fxh - fx) / std::abs(fx));
  }
  return worst;
}

ModeInfimum mode_infimum(Formula formula, const InequalityParams& params, int k_max) {
  if (k_max < 2) fail(ErrorKind::domain, "k_max must be >= 2, got " + std::to_string(k_max));
  params.validate();

  ModeInfimum out;
  out.scanned.reserve(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    ModeQuotient q;
    switch (formula) {
      case Formula::J: q = mode_quotient_J(params.N, k); break;
      case Formula::K: q = mode_quotient_K(params, k); break;
      case Formula::DnGeneral:
        q.k = k;
        q.exact = exact_dn_term(params, k);
        q.value = to_double(q.exact);
        q.formula = Formula::DnGeneral;
        q.params = params;
        break;
    }
    out.scanned.push_back(std::move(q));
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < out.scanned.size(); ++i) {
    if (out.scanned[i].exact < out.scanned[best].exact) best = i;
  }
  out.minimum = out.scanned[best];
  out.argmin = static_cast<int>(best);

  InequalityParams tail = params;
  switch (formula) {
    case Formula::J:
      // f is increasing on [2, inf) for 2 <= N <= 4, and for N >= 5 it is the
      // alpha = 0 instance of the K argument.
      tail.alpha = 0.0;
      out.hypotheses_hold = params.N >= 2;
      break;
    case Formula::K:
      out.hypotheses_hold = params.weighted_case_holds();
      break;
    case Formula::DnGeneral:
      out.hypotheses_hold = params.beta_or_zero() == 0.0 && params.weighted_case_holds();
      break;
  }
  out.worst_tail_increment = sampled_tail_increment(tail);
  out.tail_verified = out.hypotheses_hold && out.worst_tail_increment >= -1e-12;
  return out;
}

Rational exact_sharp_constant(const InequalityParams& params) {
  params.validate();
  const Rational a = to_rational(params.alpha);
  if (params.N == 1) {
    if (params.alpha <= -1.0) {
      fail(ErrorKind::unsupported_regime,
           "N=1 requires alpha > -1 (the alpha < -1 branch is not supported), got alpha=" +
               std::to_string(params.alpha));
    }
    if (params.alpha <= -0.5) return quarter_square(a);
    return quarter_square(3 * a + 2);
  }
  std::vector<std::string> failed;
  if (!(params.alpha > -1.0)) failed.push_back("alpha > -1");
  if (!(static_cast<double>(params.N) >= 5.0 * params.alpha + 5.0)) failed.push_back("N >= 5*alpha + 5");
  if (!failed.empty()) {
    std::ostringstream os;
    os << "no closed-form sharp constant for " << params.describe() << ": condition";
    for (std::size_t i = 0; i < failed.size(); ++i) os << (i ? " and " : " ") << failed[i];
    os << " fails";
    fail(ErrorKind::unsupported_regime, os.str());
  }
  return quarter_square(Rational(params.N) + 3 * a + 1);
}

double sharp_constant_closed_form(const InequalityParams& params) {
  return to_double(exact_sharp_constant(params));
}

Rational exact_test_function_value(int N) {
  if (N < 2) fail(ErrorKind::domain, "test-function quotient requires N >= 2");
  const Rational n(N);
  return n * (n + 4) * sq(n * n - 1) / (4 * sq(n * n - n + 4));
}

BoundsReport symmetry_breaking_bounds(int N) {
  BoundsReport b;
  b.N = N;
  const Rational n(N);
  b.exact_conjectured = quarter_square(n + 1);
  if (N == 2 || N == 3) {
    b.exact_lower = sq(sq(n - 1)) * sq(n + 3) / (4 * sq(n * n - 2 * n + 5));
    b.exact_upper = exact_test_function_value(N);
  } else if (N == 4) {
    b.exact_lower = exact_mode_quotient_J(4, 1);
    b.exact_upper = b.exact_conjectured;
    b.conjecture_open = true;
  } else {
    fail(ErrorKind::domain,
         "symmetry-breaking bounds are available for N in {2, 3, 4}, got N=" + std::to_string(N));
  }
  if (b.exact_lower > b.exact_upper) fail(ErrorKind::consistency, "bounds: lower exceeds upper");
  if (!b.conjecture_open && !(b.exact_upper < b.exact_conjectured)) {
    fail(ErrorKind::consistency, "bounds: test-function value does not beat the radial constant");
  }
  b.lower = to_double(b.exact_lower);
  b.upper = to_double(b.exact_upper);
  b.conjectured = to_double(b.exact_conjectured);
  return b;
}

std::map<std::string, ReferenceConstant> reference_constants(const InequalityParams& params) {
  params.validate();
  const double N = params.N;
  const double a = params.alpha;
  const double beta = params.beta_or_zero();
  std::map<std::string, ReferenceConstant> out;

  auto add = [&](ReferenceConstant c) { out.emplace(c.name, std::move(c)); };

  add({"first_order_hyup", (N - 1) * (N - 1) / 4.0, params.N >= 2,
       "int|grad u|^2 int|u|^2 >= C (int|u|^2/|x|)^2; attained by a exp(-b|x|); stated for N >= 2"});
  add({"second_order_hyup", (N + 1) * (N + 1) / 4.0, params.N >= 5,
       "alpha = beta = 0; sharp for N >= 5, radial value for 2 <= N <= 4"});
  add({"second_order_heisenberg", (N + 2) * (N + 2) / 4.0, true,
       "int|Lap u|^2 int|x|^2|grad u|^2 >= C (int|grad u|^2)^2; attained by a exp(-b|x|^2)"});

  ReferenceConstant beta_entry{"beta_weighted_hyup", std::nullopt, params.N >= 5, ""};
  if (beta < 1.0) {
    beta_entry.value = (N - beta + 1) * (N - beta + 1) / 4.0;
    beta_entry.note = "alpha = 0, beta < 1: (N - beta + 1)^2/4";
  } else if (beta > 1.0) {
    beta_entry.value = (N + beta - 1) * (N + beta - 1) / 4.0;
    beta_entry.note = "alpha = 0, beta > 1: (N + beta - 1)^2/4";
  } else {
    beta_entry.note = "beta = 1 is the Hardy-Rellich inequality; no value reported";
  }
  add(beta_entry);

  add({"alpha_weighted_heisenberg", (N + 4 * a + 2) * (N + 4 * a + 2) / 4.0,
       params.N >= 2 && (a + 1 > 0 || N + 4 * a + 2 > 0),
       "beta = -alpha - 1: (N + 4 alpha + 2)^2/4; attained by a exp(-b|x|^{2(alpha+1)})"});

  ReferenceConstant weighted{"weighted_hyup", std::nullopt, false, ""};
  try {
    weighted.value = sharp_constant_closed_form(InequalityParams{params.N, a, std::nullopt});
    weighted.precondition_met = true;
    weighted.note = "beta = 0 closed form";
  } catch (const Error& e) {
    weighted.note = e.what();
  }
  add(weighted);

  ReferenceConstant dn{"dn_general_lower_bound", std::nullopt, false, ""};
  const DnConditions cond = check_dn_conditions(params);
  if (cond.ok()) {
    dn.value = dn_general_lower_bound(params, 64);
    dn.precondition_met = true;
    dn.note = "infimum over k <= 64 of the general (alpha, beta) per-mode bound";
  } else {
    dn.note = "conditions fail:";
    for (const auto& f : cond.failed) dn.note += " " + f;
  }
  add(dn);
  return out;
}

DnConditions check_dn_conditions(const InequalityParams& params) {
  const double N = params.N;
  const double a = params.alpha;
  const double b = params.beta_or_zero();
  DnConditions c;
  if (!(N - 2 * a > 0)) c.failed.emplace_back("N - 2*alpha > 0");
  if (!(N - 2 * b > 0)) c.failed.emplace_back("N - 2*beta > 0");
  if (!(N - a - b - 1 > 0)) c.failed.emplace_back("N - alpha - beta - 1 > 0");
  if (!(a - b + 1 > 0)) c.failed.emplace_back("alpha - beta + 1 > 0");
  if (!(N + 2 * a > 0)) c.failed.emplace_back("N + 2*alpha > 0");
  return c;
}

Rational exact_dn_term(const InequalityParams& params, int k) {
  require_mode_index(k);
  const DnConditions cond = check_dn_conditions(params);
  if (!cond.ok()) {
    std::ostringstream os;
    os << "general lower bound preconditions violated for " << params.describe() << ":";
    for (const auto& f : cond.failed) os << " [" << f << "]";
    fail(ErrorKind::domain, os.str());
  }
  const Rational N(params.N);
  const Rational a = to_rational(params.alpha);
  const Rational b = to_rational(params.beta_or_zero());
  const Rational main = quarter_square(N + 2 * k + 3 * a - b + 1);
  if (k == 0) return main;

  const Rational d1 = sq(N + 2 * k - 2 * b - 2);
  const Rational d2 = sq(N + 2 * k - a - b - 3);
  if (d1 == 0 || d2 == 0) fail(ErrorKind::zero_denominator, "general lower bound: vanishing denominator");
  const Rational num = 1 + std::min(Rational(0), Rational(8 * b * k / d1));
  const Rational den = sq(1 + std::max(Rational(0), Rational(4 * (a + b + 1) * k / d2)));
  return num / den * main;
}

double dn_general_lower_bound(const InequalityParams& params, int k_max) {
  if (k_max < 0) fail(ErrorKind::domain, "k_max must be >= 0");
  Rational best = exact_dn_term(params, 0);
  for (int k = 1; k <= k_max; ++k) best = std::min(best, exact_dn_term(params, k));
  return to_double(best);
}

namespace monotone {
namespace {
double D(int N, double x) { return x * x + 2.0 * (N - 2) * x + (N - 3.0) * (N - 3.0); }
}  // namespace

double f(int N, double x) {
  const double t = N + x - 3.0;
  const double d = t * t + 2.0 * x;
  return t * t * t * t / (d * d) * (N + x + 1.0) * (N + x + 1.0) / 4.0;
}

double g(int N, double x) { return (N + x + 1.0) * (N + x + 1.0) / (4.0 * std::pow(D(N, x), 0.25)); }

double h(int N, double x) { return std::pow(N + x - 3.0, 4) / std::pow(D(N, x), 1.75); }

double g_prime_factor(int N, double x) {
  return 3.0 * x * x + 3.0 * (2.0 * N - 5.0) * x + 4.0 * (N - 3.0) * (N - 3.0) - (N * N - N - 2.0);
}

double h_prime_factor(int N, double x) {
  return x * x + (2.0 * N + 3.0) * x + (N * N - 13.0 * N + 30.0);
}

double g_prime(int N, double x) {
  return (N + x + 1.0) * g_prime_factor(N, x) / (8.0 * std::pow(D(N, x), 1.25));
}

double h_prime(int N, double x) {
  return std::pow(N + x - 3.0, 3) * h_prime_factor(N, x) / (2.0 * std::pow(D(N, x), 2.75));
}

double G(double alpha, double x, double t) {
  const double d = t * t + 2.0 * (alpha + 1.0) * x;
  const double u = t + 4.0 * alpha + 4.0;
  return t * t * t * t * u * u / (4.0 * d * d);
}

double dG_dx(double alpha, double x, double t) {
  const double d = t * t + 2.0 * (alpha + 1.0) * x;
  const double u = t + 4.0 * alpha + 4.0;
  return -(alpha + 1.0) * std::pow(t, 4) * u * u / (d * d * d);
}

double dG_dt(double alpha, double x, double t) {
  const double d = t * t + 2.0 * (alpha + 1.0) * x;
  const double u = t + 4.0 * alpha + 4.0;
  return u * t * t * t * (t * t * t + 2.0 * (alpha + 1.0) * x * (3.0 * t + 8.0 * alpha + 8.0)) /
         (2.0 * d * d * d);
}

double F_prime_lower_bound(double alpha, double x, double t) {
  const double d = t * t + 2.0 * (alpha + 1.0) * x;
  return (t + 4.0 * alpha + 4.0) * std::pow(t, 4) * (t + 2.0 * (alpha + 1.0)) *
         (t - 4.0 * (alpha + 1.0)) / (2.0 * d * d * d);
}

double first_mode_quartic_gap(double alpha, double y) {
  const double l = y * y * y * y * (y + 4 * alpha + 4) * (y + 4 * alpha + 4);
  const double r = (y + 4 * alpha + 2) * (y + 4 * alpha + 2) * (y * y + 4 * alpha + 4) *
                   (y * y + 4 * alpha + 4);
  return l - r;
}

double first_mode_reduced_gap(double alpha, double y) {
  return y * y - 2.0 * (alpha + 1.0) * y - 4.0 * (alpha + 1.0) * (2.0 * alpha + 1.0);
}
}  // namespace monotone

}  // namespace cknlab::constants
