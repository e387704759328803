#include "cknlab/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cknlab/error.hpp"

namespace cknlab::special {
namespace {

// Lanczos approximation, g = 7, n = 9 (Godfrey's coefficient set).
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kSqrtTwoPi = 2.5066282746310005024;

// Largest t with finite Γ(t).
constexpr double kGammaMaxArg = 171.62437695630272;

constexpr double kRecurrenceFrom = 10.0;

double lanczos_sum(double z) {
  double x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  return x;
}

void check_arg(double t) {
  if (!std::isfinite(t) || t <= 0.0) {
    std::ostringstream os;
    os << "gamma: argument must be a positive finite real, got " << t;
    fail(ErrorKind::domain, os.str());
  }
}

// Γ(t) for t >= 0.5 without the overflow check.
double gamma_upper(double t) {
  const double z = t - 1.0;
  const double base = z + kLanczosG + 0.5;
  // base^{z+1/2} is split in two halves so that it stays finite up to t ~ 171.
  const double half = std::pow(base, 0.5 * (z + 0.5));
  return half * (kSqrtTwoPi * std::exp(-base) * lanczos_sum(z)) * half;
}

}  // namespace

double gamma(double t) {
  check_arg(t);
  if (t > kGammaMaxArg) {
    std::ostringstream os;
    os << "gamma: Γ(" << t << ") overflows double";
    fail(ErrorKind::overflow, os.str());
  }
  if (t < 0.5) {
    // Reflection: Γ(t)Γ(1-t) = π / sin(πt).
    return std::numbers::pi / (std::sin(std::numbers::pi * t) * gamma_upper(1.0 - t));
  }
  if (t < kRecurrenceFrom) return gamma_upper(t);
  // The Lanczos error grows with t; shift the argument into [9, 10) and
  // multiply back with Γ(t) = Γ(t-n) (t-1)(t-2)...(t-n). Every t-k is exact.
  const int n = static_cast<int>(std::floor(t - kRecurrenceFrom + 1.0));
  double g = gamma_upper(t - n);
  for (int k = 1; k <= n; ++k) g *= (t - k);
  if (!std::isfinite(g)) fail(ErrorKind::overflow, "gamma: result overflows double");
  return g;
}

double log_gamma(double t) {
  check_arg(t);
  if (t < 0.5) {
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * t)) - log_gamma(1.0 - t);
  }
  if (t < 100.0) return std::log(gamma_upper(t));
  const double z = t - 1.0;
  const double base = z + kLanczosG + 0.5;
  return std::log(kSqrtTwoPi) + (z + 0.5) * std::log(base) - base + std::log(lanczos_sum(z));
}

void WeightedExpIntegral::validate() const {
  std::ostringstream os;
  if (!(p > -1.0)) {
    os << "weighted_exp_integral diverges at r=0: exponent p=" << p << " must exceed -1";
    fail(ErrorKind::divergence, os.str());
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    os << "weighted_exp_integral diverges at infinity: decay rate c=" << c << " must be positive";
    fail(ErrorKind::divergence, os.str());
  }
  if (!(q > 0.0) || !std::isfinite(q)) {
    os << "weighted_exp_integral diverges at infinity: decay exponent q=" << q << " must be positive";
    fail(ErrorKind::divergence, os.str());
  }
}

double weighted_exp_integral(const WeightedExpIntegral& i) {
  i.validate();
  const double x = (i.p + 1.0) / i.q;
  if (x <= kGammaMaxArg) {
    const double cx = std::pow(i.c, x);
    if (std::isfinite(cx) && cx > 0.0) {
      const double v = gamma(x) / (i.q * cx);
      if (std::isfinite(v) && v > 0.0) return v;
    }
  }
  const double lv = log_weighted_exp_integral(i);
  const double v = std::exp(lv);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "weighted_exp_integral(p=" << i.p << ", c=" << i.c << ", q=" << i.q
       << ") overflows double (log value " << lv << ")";
    fail(ErrorKind::overflow, os.str());
  }
  return v;
}

double log_weighted_exp_integral(const WeightedExpIntegral& i) {
  i.validate();
  const double x = (i.p + 1.0) / i.q;
  return log_gamma(x) - std::log(i.q) - x * std::log(i.c);
}

}  // namespace cknlab::special
