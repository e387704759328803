#include <cmath>

#include <boost/math/tools/minima.hpp>
#include <gtest/gtest.h>

#include "cknlab/constants.hpp"
#include "cknlab/error.hpp"
#include "cknlab/variational.hpp"

using namespace cknlab;
using namespace cknlab::variational;

namespace {

InequalityParams P(int N, double a) { return {N, a, std::nullopt}; }

// sqrt(Q*) = min over t > 0 of lambda_min(t A + B / t) / 2 when C is the identity.
double eigen_oracle(const GramTriple& g) {
  auto lam = [&](double s) {
    const double t = std::exp(s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t * g.A + g.B / t, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() / 2;
  };
  double best_s = 0, best = lam(0);
  for (double s = -20; s <= 20; s += 0.01) {
    if (const double v = lam(s); v < best) best = v, best_s = s;
  }
  const auto r = boost::math::tools::brent_find_minima(lam, best_s - 0.02, best_s + 0.02, 52);
  return r.second * r.second;
}

}  // namespace

TEST(Gram, ClosedFormEntry) {
  const auto g = build_gram(P(5, 0), 0, BasisSpec::for_alpha(0.0, 3));
  // B_00 = ∫ r^2 e^{-2r} r^4 dr = Γ(7)/2^7
  EXPECT_NEAR(g.B(0, 0), 720.0 / 128.0, 1e-13);
  EXPECT_GT(g.verified_entries, 0);
  EXPECT_FALSE(g.conditioned);
}

TEST(Gram, ConditionedTripleHasIdentityC) {
  const auto g = build_conditioned_gram(P(4, 0), 1, BasisSpec::for_alpha(0.0, 8), {GramForm::full});
  EXPECT_TRUE(g.conditioned);
  EXPECT_LT((g.C - Eigen::MatrixXd::Identity(8, 8)).norm(), 1e-12);
  // the plain double-precision Gram is only compared on a small, well-conditioned basis
  const auto small = build_conditioned_gram(P(4, 0), 1, BasisSpec::for_alpha(0.0, 4), {GramForm::full});
  const auto plain = build_gram(P(4, 0), 1, BasisSpec::for_alpha(0.0, 4), {GramForm::full});
  const Eigen::MatrixXd T = small.to_monomial;
  EXPECT_LT((T.transpose() * plain.B * T - small.B).norm() / small.B.norm(), 1e-10);
  EXPECT_LT((T.transpose() * plain.A * T - small.A).norm() / small.A.norm(), 1e-10);
}

TEST(Minimize, MatchesGeneralizedEigenOracle) {
  for (auto [N, k] : std::vector<std::pair<int, int>>{{2, 1}, {4, 1}, {5, 0}, {3, 2}}) {
    const auto g = build_conditioned_gram(P(N, 0), k, BasisSpec::for_alpha(0.0, 6), {GramForm::full});
    const auto res = minimize_quotient(g);
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.value / eigen_oracle(g), 1.0, 1e-9) << N << " " << k;
  }
}

TEST(Minimize, GradientMatchesDifferences) {
  const auto g = build_conditioned_gram(P(4, 0), 1, BasisSpec::for_alpha(0.0, 5), {GramForm::full});
  Eigen::VectorXd y(5);
  y << 1.0, 0.3, -0.2, 0.1, 0.05;
  const auto lq = log_quotient(g, y);
  for (int i = 0; i < 5; ++i) {
    const double h = 1e-6;
    Eigen::VectorXd yp = y, ym = y;
    yp[i] += h;
    ym[i] -= h;
    const double fd = (log_quotient(g, yp).value - log_quotient(g, ym).value) / (2 * h);
    EXPECT_NEAR(lq.gradient[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST(Estimate, FrozenValuesTwoDimensions) {
  const auto est = estimate_mode_constant(P(2, 0), 1, {1, 4, 8});
  ASSERT_EQ(est.trace.size(), 3u);
  EXPECT_NEAR(est.trace[0].value, 0.87890625, 1e-12);
  EXPECT_NEAR(est.trace[1].value, 0.776146900659497, 1e-11);
  EXPECT_NEAR(est.trace[2].value, 0.734339430416213, 1e-10);
  EXPECT_TRUE(est.trace_monotone);
  EXPECT_GE(est.result.value, constants::mode_quotient_J(2, 1).value);
}

TEST(Estimate, FrozenValuesFourDimensions) {
  const auto est = estimate_mode_constant(P(4, 0), 1, {1, 4, 8, 12});
  ASSERT_EQ(est.trace.size(), 4u);
  EXPECT_NEAR(est.trace[0].value, 7.12618500430911, 1e-11);
  EXPECT_NEAR(est.trace[1].value, 7.02796750005651, 1e-10);
  EXPECT_NEAR(est.trace[2].value, 7.00635541340925, 1e-9);
  EXPECT_NEAR(est.trace[3].value, 7.00387301348288, 1e-9);
  for (const auto& t : est.trace) EXPECT_TRUE(t.converged);
  EXPECT_TRUE(est.trace_monotone);
}

TEST(Estimate, RadialModeRecoversSharpConstant) {
  const auto est = estimate_mode_constant(P(5, 0), 0, {4, 8});
  EXPECT_NEAR(est.result.value, 9.0, 1e-9);
  const auto est2 = estimate_mode_constant(P(12, 1), 0, {4});
  EXPECT_NEAR(est2.result.value, 64.0, 1e-8);
}

TEST(Estimate, RestartDeterminism) {
  EstimateOptions o;
  o.minimize.seed = 7;
  const auto a = estimate_mode_constant(P(3, 0), 1, {4, 6}, o);
  const auto b = estimate_mode_constant(P(3, 0), 1, {4, 6}, o);
  EXPECT_EQ(a.result.value, b.result.value);
  EXPECT_EQ(a.result.coeffs, b.result.coeffs);
}

TEST(Estimate, SizesMustIncrease) {
  EXPECT_THROW(estimate_mode_constant(P(4, 0), 1, {8, 4}), Error);
  EXPECT_THROW(estimate_mode_constant(P(4, 0), 1, {4, 4}), Error);
  EXPECT_THROW(estimate_mode_constant(P(4, 0), 1, {}), Error);
  EXPECT_THROW(estimate_mode_constant(P(4, 0), 1, {0, 2}), Error);
}

TEST(Minimize, IndefiniteAWarns) {
  GramTriple g;
  g.A = Eigen::Vector3d(2.0, -1.0, 3.0).asDiagonal();
  g.B = Eigen::MatrixXd::Identity(3, 3);
  g.C = Eigen::MatrixXd::Identity(3, 3);
  g.to_monomial = Eigen::MatrixXd::Identity(3, 3);
  g.conditioned = true;
  g.a_indefinite = true;
  const auto res = minimize_quotient(g);
  EXPECT_FALSE(res.warnings.empty());
}

TEST(Scan, VerdictsByDimension) {
  ScanOptions o;
  o.basis_sizes = {4, 8};
  o.jobs = 2;
  const auto s5 = symmetry_breaking_scan(5, 0.0, 3, o);
  EXPECT_TRUE(s5.radial);
  EXPECT_EQ(s5.verdict, "radial");
  const auto s3 = symmetry_breaking_scan(3, 0.0, 3, o);
  EXPECT_FALSE(s3.radial);
  EXPECT_EQ(s3.verdict, "symmetry-broken at k=1");
  ASSERT_EQ(s3.rows.size(), 4u);
  EXPECT_NEAR(s3.rows[1].effective, 2.25, 1e-6);
  EXPECT_NEAR(s3.rows[1].hardy_factor, 1 + 4.0 / 4.0, 1e-15);
  EXPECT_FALSE(s3.conjecture_open);
}

TEST(Scan, JobsDoNotChangeResults) {
  ScanOptions a, b;
  a.basis_sizes = b.basis_sizes = {4};
  a.jobs = 1;
  b.jobs = 3;
  const auto r1 = symmetry_breaking_scan(6, 0.0, 3, a);
  const auto r2 = symmetry_breaking_scan(6, 0.0, 3, b);
  for (std::size_t i = 0; i < r1.rows.size(); ++i) EXPECT_EQ(r1.rows[i].full, r2.rows[i].full);
}

TEST(Probe, OnlyFourDimensions) {
  EXPECT_THROW(probe_conjecture(3, {}, 2), Error);
  ScanOptions o;
  o.basis_sizes = {4, 8};
  const auto p = probe_conjecture(4, o, 2);
  EXPECT_TRUE(p.scan.conjecture_open);
  EXPECT_EQ(p.lower_bound_exact, "3969/676");
  EXPECT_DOUBLE_EQ(p.radial_bound, 6.25);
  EXPECT_GE(p.estimate, p.lower_bound);
  EXPECT_NEAR(p.radial_value, 6.25, 1e-8);
  EXPECT_NE(p.banner.find("numerical evidence only"), std::string::npos);
}
