#include <cmath>
#include <limits>
#include <random>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "cknlab/error.hpp"
#include "cknlab/quadrature.hpp"
#include "cknlab/special.hpp"

using namespace cknlab;
using namespace cknlab::quadrature;

namespace {

IntegrandHandle stretched_exp(double p, double c, double q) {
  IntegrandHandle h;
  h.evaluator = [c, q](double r) { return std::exp(-c * std::pow(r, q)); };
  h.weight_exponent = p;
  h.decay_hint = DecayHint{c, q};
  return h;
}

double oracle(double p, double c, double q) {
  return boost::math::tgamma((p + 1) / q) / (q * std::pow(c, (p + 1) / q));
}

}  // namespace

TEST(Quadrature, MatchesGammaOracle) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> up(-0.8, 10), uc(0.2, 4), uq(0.5, 3);
  for (int i = 0; i < 200; ++i) {
    const double p = up(rng), c = uc(rng), q = uq(rng);
    const auto r = integrate(stretched_exp(p, c, q));
    EXPECT_NEAR(r.value / oracle(p, c, q), 1.0, 1e-10) << p << " " << c << " " << q;
  }
}

TEST(Quadrature, SplitPointInvariance) {
  for (double split : {0.5, 1.0, 2.0}) {
    QuadratureSpec spec;
    spec.split_point = split;
    const auto r = integrate(stretched_exp(1.5, 1.0, 1.0), spec);
    EXPECT_NEAR(r.value / oracle(1.5, 1.0, 1.0), 1.0, 1e-11) << split;
  }
}

TEST(Quadrature, EndpointSingularity) {
  const auto r = integrate(stretched_exp(-0.9, 1.0, 1.0));
  EXPECT_NEAR(r.value / oracle(-0.9, 1.0, 1.0), 1.0, 1e-9);
}

TEST(Quadrature, RefinementConverges) {
  const auto r = integrate(stretched_exp(3.0, 1.0, 2.0));
  ASSERT_GE(r.level_values.size(), 3u);
  const double exact = oracle(3.0, 1.0, 2.0);
  const double last = std::abs(r.level_values.back() - exact);
  const double first = std::abs(r.level_values.front() - exact);
  EXPECT_LE(last, first);
  EXPECT_LT(r.err_est, 1e-10 * exact);
  EXPECT_GT(r.evaluations, 0);
}

TEST(Quadrature, LogScaleKeepsHugeIntegralsFinite) {
  // ∫ r^400 e^{-r} = 400!, far past the double range.
  IntegrandHandle h = stretched_exp(400.0, 1.0, 1.0);
  h.evaluator = [](double) { return 1.0; };
  h.decay_factored = true;
  h.log_scale = special::log_gamma(401.0);
  const auto r = integrate(h);
  EXPECT_NEAR(r.value, 1.0, 1e-9);
}

TEST(Quadrature, FromLowerLimit) {
  // ∫_1^∞ e^{-r} = e^{-1}
  const auto r = integrate_from(stretched_exp(0.0, 1.0, 1.0), 1.0);
  EXPECT_NEAR(r.value, std::exp(-1.0), 1e-13);
}

TEST(Quadrature, NonConvergenceCarriesEstimate) {
  IntegrandHandle h;
  h.evaluator = [](double r) { return std::sin(50.0 * r) * std::exp(-0.01 * r); };
  QuadratureSpec spec;
  spec.max_level = 4;
  spec.rel_tol = 1e-14;
  try {
    integrate(h, spec);
    FAIL() << "expected non-convergence";
  } catch (const NonConvergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_convergence);
    EXPECT_TRUE(std::isfinite(e.value()));
  }
}

TEST(Quadrature, NonFiniteSample) {
  IntegrandHandle h;
  h.evaluator = [](double r) { return r > 0.5 && r < 0.7 ? std::numeric_limits<double>::quiet_NaN() : std::exp(-r); };
  try {
    integrate(h);
    FAIL() << "expected non-finite sample";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_finite_sample);
  }
}

TEST(Quadrature, SpecValidation) {
  QuadratureSpec bad;
  bad.rel_tol = 0.1;
  EXPECT_THROW(bad.validate(), Error);
  bad = {};
  bad.max_level = 30;
  EXPECT_THROW(bad.validate(), Error);
  bad = {};
  bad.split_point = 0.0;
  EXPECT_THROW(bad.validate(), Error);
  IntegrandHandle h = stretched_exp(-1.0, 1.0, 1.0);
  EXPECT_THROW(integrate(h), Error);
}
