#include "cknlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cknlab/error.hpp"

namespace cknlab::quadrature {
namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kNegligibleLog = -800.0;
constexpr int kMinLevels = 3;

// log(1 / (1 + e^{-u})) without overflow.
double log_sigmoid(double u) {
  return u >= 0.0 ? -std::log1p(std::exp(-u)) : u - std::log1p(std::exp(u));
}

// One transformed piece of the integral: t -> contribution (already
// multiplied by the Jacobian), summed over t in [t_lo, t_hi] ∩ hZ.
struct Piece {
  enum class Kind { tanh_sinh, exp_sinh, exp_sinh_decay } kind;
  double a = 0.0;      // split point, lower limit, or lower limit in s = c r^q
  double scale = 1.0;  // exp-sinh scale in s
  double t_lo = 0.0;
  double t_hi = 0.0;
};

class Evaluator {
 public:
  explicit Evaluator(const IntegrandHandle& h) : h_(h) {}

  int calls() const { return calls_; }

  double operator()(const Piece& piece, double t) {
    double log_r = 0.0;
    double log_jac = 0.0;  // log(dr/dt)
    double decay = 0.0;    // exponent of the factored-out decay
    switch (piece.kind) {
      case Piece::Kind::tanh_sinh: {
        const double u = std::numbers::pi * std::sinh(t);
        log_r = std::log(piece.a) + log_sigmoid(u);
        log_jac = log_r + log_sigmoid(-u) + std::log(std::numbers::pi * std::cosh(t));
        break;
      }
      case Piece::Kind::exp_sinh: {
        const double e = kHalfPi * std::sinh(t);
        log_r = std::log(piece.a + piece.scale * std::exp(e));
        log_jac = std::log(piece.scale) + e + std::log(kHalfPi * std::cosh(t));
        break;
      }
      case Piece::Kind::exp_sinh_decay: {
        const DecayHint& d = *h_.decay_hint;
        const double e = kHalfPi * std::sinh(t);
        const double s = piece.a + piece.scale * std::exp(e);
        const double log_s = std::log(s);
        log_r = (log_s - std::log(d.c)) / d.q;
        log_jac = log_r - std::log(d.q) - log_s + std::log(piece.scale) + e +
                  std::log(kHalfPi * std::cosh(t));
        // f carries (or is bounded by) e^{-(s - s0)}; far out the node is negligible.
        const double w = (h_.weight_exponent * log_r + log_jac) - (s - piece.a) - h_.log_scale;
        if (w < kNegligibleLog) return 0.0;
        break;
      }
    }
    if (h_.decay_factored) {
      const DecayHint& d = *h_.decay_hint;
      decay = d.c * std::exp(d.q * log_r);
    }
    const double w = h_.weight_exponent * log_r + log_jac - decay - h_.log_scale;
    if (h_.decay_factored && w < kNegligibleLog) return 0.0;

    const double r = std::exp(log_r);
    ++calls_;
    const double f = h_.evaluator(r);
    if (!std::isfinite(f)) {
      std::ostringstream os;
      os << "integrand returned a non-finite value (" << f << ") at r=" << r;
      fail(ErrorKind::non_finite_sample, os.str());
    }
    if (f == 0.0) return 0.0;
    const double v = std::exp(w + std::log(std::abs(f)));
    return f < 0.0 ? -v : v;
  }

 private:
  const IntegrandHandle& h_;
  int calls_ = 0;
};

QuadratureResult run(const IntegrandHandle& h, const std::vector<Piece>& pieces,
                     const QuadratureSpec& spec) {
  Evaluator eval(h);
  QuadratureResult res;
  double sum = 0.0;
  double prev = 0.0;
  for (int level = 0; level <= spec.max_level; ++level) {
    const double step = std::ldexp(1.0, -level);
    for (const Piece& p : pieces) {
      const auto j_lo = static_cast<long>(std::ceil(p.t_lo / step));
      const auto j_hi = static_cast<long>(std::floor(p.t_hi / step));
      for (long j = j_lo; j <= j_hi; ++j) {
        if (level > 0 && (j % 2 == 0)) continue;
        sum += eval(p, static_cast<double>(j) * step);
      }
    }
    const double value = step * sum;
    res.level_values.push_back(value);
    res.value = value;
    res.levels = level + 1;
    if (level > 0) {
      res.err_est = std::abs(value - prev);
      if (level + 1 >= kMinLevels &&
          res.err_est <= std::max(spec.rel_tol * std::abs(value), 1e-300)) {
        res.evaluations = eval.calls();
        return res;
      }
    }
    prev = value;
  }
  res.evaluations = eval.calls();
  std::ostringstream os;
  os << "quadrature did not reach rel_tol=" << spec.rel_tol << " within max_level="
     << spec.max_level << " (last value " << res.value << ", err_est " << res.err_est << ")";
  throw NonConvergenceError(os.str(), res.value, res.err_est);
}

Piece outer_piece(const IntegrandHandle& h, double lo) {
  if (h.decay_hint) {
    const DecayHint& d = *h.decay_hint;
    // Scale the exp-sinh map to the peak of s^{(p+1)/q - 1} e^{-s}.
    const double peak = (h.weight_exponent + 1.0) / d.q - 1.0;
    return Piece{Piece::Kind::exp_sinh_decay, d.c * std::pow(lo, d.q), std::max(1.0, peak), -5.0,
                 4.0};
  }
  return Piece{Piece::Kind::exp_sinh, lo, std::max(1.0, lo), -4.5, 4.5};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 1e-15 && rel_tol < 1e-3)) {
    fail(ErrorKind::domain, "rel_tol must lie in (1e-15, 1e-3), got " + std::to_string(rel_tol));
  }
  if (max_level < 4 || max_level > 16) {
    fail(ErrorKind::domain, "max_level must lie in [4, 16], got " + std::to_string(max_level));
  }
  if (!(split_point > 0.0) || !std::isfinite(split_point)) {
    fail(ErrorKind::domain, "split_point must be a positive finite real");
  }
}

void IntegrandHandle::validate() const {
  if (!evaluator) fail(ErrorKind::domain, "integrand has no evaluator");
  if (!(weight_exponent > -1.0)) {
    std::ostringstream os;
    os << "integral diverges at r=0: weight exponent p=" << weight_exponent << " must exceed -1";
    fail(ErrorKind::divergence, os.str());
  }
  if (decay_hint && (!(decay_hint->c > 0.0) || !(decay_hint->q > 0.0))) {
    fail(ErrorKind::divergence, "decay hint needs c > 0 and q > 0");
  }
  if (decay_factored && !decay_hint) {
    fail(ErrorKind::domain, "decay_factored requires a decay hint");
  }
  if (!std::isfinite(log_scale)) fail(ErrorKind::domain, "log_scale must be finite");
}

QuadratureResult integrate(const IntegrandHandle& h, const QuadratureSpec& spec) {
  spec.validate();
  h.validate();
  std::vector<Piece> pieces;
  pieces.push_back(Piece{Piece::Kind::tanh_sinh, spec.split_point, 1.0, -6.0, 4.0});
  pieces.push_back(outer_piece(h, spec.split_point));
  return run(h, pieces, spec);
}

QuadratureResult integrate_from(const IntegrandHandle& h, double lo, const QuadratureSpec& spec) {
  spec.validate();
  h.validate();
  if (!(lo > 0.0) || !std::isfinite(lo)) fail(ErrorKind::domain, "lower limit must be positive");
  return run(h, {outer_piece(h, lo)}, spec);
}

}  // namespace cknlab::quadrature
