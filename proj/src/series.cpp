#include "cknlab/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cknlab/error.hpp"
#include "cknlab/special.hpp"

namespace cknlab {
namespace {

constexpr double kExponentMergeTol = 1e-13;

bool is_positive_integer(double x, long* n) {
  const double r = std::round(x);
  if (r < 1.0 || std::abs(x - r) > 1e-12 * std::max(1.0, std::abs(x))) return false;
  *n = static_cast<long>(r);
  return true;
}

}  // namespace

LogValue LogValue::from(double x) {
  if (x == 0.0) return {};
  return {std::log(std::abs(x)), x > 0.0 ? 1 : -1};
}

double LogValue::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

LogValue LogValue::operator+(const LogValue& o) const {
  if (sign == 0) return o;
  if (o.sign == 0) return *this;
  const double m = std::max(log_abs, o.log_abs);
  const double s = sign * std::exp(log_abs - m) + o.sign * std::exp(o.log_abs - m);
  if (s == 0.0) return {};
  return {m + std::log(std::abs(s)), s > 0.0 ? 1 : -1};
}

LogValue LogValue::operator*(double c) const {
  if (c == 0.0 || sign == 0) return {};
  return {log_abs + std::log(std::abs(c)), c > 0.0 ? sign : -sign};
}

ExpPolySeries::ExpPolySeries(double rate, double q, std::vector<ExpPolyTerm> terms)
    : rate_(rate), q_(q) {
  if (!(q > 0.0) || !std::isfinite(q)) fail(ErrorKind::domain, "series decay exponent q must be positive");
  if (!(rate > 0.0) || !std::isfinite(rate)) fail(ErrorKind::domain, "series decay rate must be positive");
  std::sort(terms.begin(), terms.end(),
            [](const ExpPolyTerm& a, const ExpPolyTerm& b) { return a.exponent < b.exponent; });
  for (const auto& t : terms) {
    if (!std::isfinite(t.coef) || !std::isfinite(t.exponent)) {
      fail(ErrorKind::domain, "series terms must be finite");
    }
    if (!terms_.empty() &&
        std::abs(terms_.back().exponent - t.exponent) <=
            kExponentMergeTol * std::max(1.0, std::abs(t.exponent))) {
      terms_.back().coef += t.coef;
    } else {
      terms_.push_back(t);
    }
  }
  std::erase_if(terms_, [](const ExpPolyTerm& t) { return t.coef == 0.0; });
}

double ExpPolySeries::min_exponent() const {
  return terms_.empty() ? 0.0 : terms_.front().exponent;
}

double ExpPolySeries::operator()(double r) const {
  return cofactor(r, 0.0) * std::exp(-rate_ * std::pow(r, q_));
}

double ExpPolySeries::cofactor(double r, double shift) const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coef * std::pow(r, t.exponent - shift);
  return s;
}

ExpPolySeries ExpPolySeries::derivative() const {
  std::vector<ExpPolyTerm> out;
  out.reserve(2 * terms_.size());
  for (const auto& t : terms_) {
    out.push_back({t.coef * t.exponent, t.exponent - 1.0});
    out.push_back({-t.coef * rate_ * q_, t.exponent + q_ - 1.0});
  }
  return ExpPolySeries(rate_, q_, std::move(out));
}

ExpPolySeries ExpPolySeries::dilated(double lambda) const {
  if (!(lambda > 0.0)) fail(ErrorKind::domain, "dilation factor must be positive");
  std::vector<ExpPolyTerm> out = terms_;
  for (auto& t : out) t.coef *= std::pow(lambda, t.exponent);
  return ExpPolySeries(rate_ * std::pow(lambda, q_), q_, std::move(out));
}

ExpPolySeries ExpPolySeries::scaled(double c) const {
  std::vector<ExpPolyTerm> out = terms_;
  for (auto& t : out) t.coef *= c;
  return ExpPolySeries(rate_, q_, std::move(out));
}

std::optional<ExpPolySeries> ExpPolySeries::antiderivative_from_infinity() const {
  // ∫_r^∞ ρ^e e^{-bρ^q} dρ = (n-1)!/(q b^n) e^{-s} Σ_{i<n} s^i/i!,  s = b r^q, n = (e+1)/q.
  std::vector<ExpPolyTerm> out;
  for (const auto& t : terms_) {
    long n = 0;
    if (!is_positive_integer((t.exponent + 1.0) / q_, &n)) return std::nullopt;
    double lead = -t.coef / (q_ * std::pow(rate_, static_cast<double>(n)));
    // (n-1)!/i! b^i for i = n-1 down to 0.
    double f = 1.0;
    for (long i = n - 1; i >= 0; --i) {
      out.push_back({lead * f * std::pow(rate_, static_cast<double>(i)), static_cast<double>(i) * q_});
      f *= static_cast<double>(i);
    }
  }
  return ExpPolySeries(rate_, q_, std::move(out));
}

LogValue weighted_product_integral(const ExpPolySeries& f, const ExpPolySeries& g, double w) {
  if (std::abs(f.decay_q() - g.decay_q()) > 1e-14 * f.decay_q()) {
    fail(ErrorKind::domain, "series products need a common decay exponent");
  }
  const double c = f.rate() + g.rate();
  const double q = f.decay_q();
  LogValue sum;
  for (const auto& a : f.terms()) {
    for (const auto& b : g.terms()) {
      const double p = w + a.exponent + b.exponent;
      if (!(p > -1.0)) {
        std::ostringstream os;
        os << "integral of r^" << p << " exp(-" << c << " r^" << q
           << ") diverges at r=0 (weight exponent " << w << ")";
        fail(ErrorKind::divergence, os.str());
      }
      const double li = special::log_weighted_exp_integral({p, c, q});
      sum = sum + LogValue{li, 1} * (a.coef * b.coef);
    }
  }
  return sum;
}

}  // namespace cknlab
