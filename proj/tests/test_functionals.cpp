#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cknlab/constants.hpp"
#include "cknlab/error.hpp"
#include "cknlab/functionals.hpp"

using namespace cknlab;
using namespace cknlab::functionals;

namespace {

InequalityParams P(int N, double a) { return {N, a, std::nullopt}; }

RadialProfile family(FamilyId id, double a, double b, InequalityParams p) {
  return extremal_profile({id, a, b, p});
}

EnergyOptions quad_only() {
  EnergyOptions o;
  o.route = EnergyRoute::quadrature_only;
  return o;
}

}  // namespace

TEST(Functionals, LaplaceBeltramiEigenvalues) {
  EXPECT_EQ(laplace_beltrami_eigenvalue(3, 0), 0);
  EXPECT_EQ(laplace_beltrami_eigenvalue(3, 1), 2);
  EXPECT_EQ(laplace_beltrami_eigenvalue(3, 2), 6);
  EXPECT_EQ(laplace_beltrami_eigenvalue(2, 4), 16);
  EXPECT_EQ(laplace_beltrami_eigenvalue(5, 3), 18);
}

TEST(Functionals, FamilyNamesRoundTrip) {
  for (auto id : {FamilyId::thmA, FamilyId::thm12_1a, FamilyId::thm12_1b, FamilyId::thm12_2, FamilyId::thmB,
                  FamilyId::thmC_1, FamilyId::thmC_2, FamilyId::thmD})
    EXPECT_EQ(parse_family(to_string(id)), id);
  EXPECT_THROW(parse_family("nope"), Error);
}

TEST(Functionals, RadialExtremalAttainsConstant) {
  for (auto [N, a] : std::vector<std::pair<int, double>>{{5, 0}, {7, 0}, {12, 1}, {10, 0.5}, {6, 0.2}, {3, -0.6}}) {
    const double C = (N + 3 * a + 1) * (N + 3 * a + 1) / 4;
    for (double b : {0.5, 1.0, 3.0}) {
      const auto v = family(FamilyId::thm12_2, 1.7, b, P(N, a));
      EXPECT_NEAR(mode_quotient(v, P(N, a), 0) / C, 1.0, 1e-10) << N << " " << a << " " << b;
      EXPECT_NEAR(mode_quotient(v, P(N, a), 0, quad_only()) / C, 1.0, 1e-9) << N << " " << a << " " << b;
    }
  }
}

TEST(Functionals, UnweightedFamilyAtZeroWeight) {
  for (int N = 5; N <= 9; ++N) {
    const auto v = family(FamilyId::thmA, 1.0, 2.0, P(N, 0));
    EXPECT_NEAR(mode_quotient(v, P(N, 0), 0), (N + 1.0) * (N + 1.0) / 4, 1e-9 * N * N);
  }
}

TEST(Functionals, OneDimensionalFamilies) {
  const auto va = family(FamilyId::thm12_1a, 1.0, 1.0, P(1, -0.75));
  EXPECT_NEAR(one_dim_quotient(va, -0.75), 0.140625, 1e-10);
  const auto vb = family(FamilyId::thm12_1b, 2.0, 0.7, P(1, 1.0));
  EXPECT_NEAR(one_dim_quotient(vb, 1.0), 6.25, 1e-9);
  const auto v0 = family(FamilyId::thm12_1b, 1.0, 1.0, P(1, 0.0));
  EXPECT_NEAR(one_dim_quotient(v0, 0.0), 1.0, 1e-10);
}

TEST(Functionals, DilationAndAmplitudeInvariance) {
  const auto p = P(4, 0.0);
  const auto v = family(FamilyId::thmB, 1.0, 1.0, p);
  for (int k : {0, 1, 3}) {
    const double q = mode_quotient(v, p, k);
    for (double lam : {0.3, 2.0, 7.5}) EXPECT_NEAR(mode_quotient(v.dilated(lam), p, k) / q, 1.0, 1e-9);
    for (double c : {1e-3, -2.0, 1e4}) EXPECT_NEAR(mode_quotient(v.scaled(c), p, k) / q, 1.0, 1e-12);
  }
}

TEST(Functionals, HardyStep) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int N : {2, 3, 4, 6}) {
    for (int k = 1; k <= 4; ++k) {
      const auto basis = BasisSpec::for_alpha(0.0, 4);
      std::vector<double> c(4);
      for (auto& x : c) x = u(rng);
      const auto v = RadialProfile::from_basis(basis, c);
      const auto e = mode_energies(v, P(N, 0), k);
      const double t = N + 2 * k - 3;
      EXPECT_LE(e.hardy_integral * t * t / 4, e.cross_gradient * (1 + 1e-10)) << N << " " << k;
    }
  }
}

TEST(Functionals, SharpFromBelow) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto p = P(5, 0.0);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> c(5);
    for (auto& x : c) x = u(rng);
    const auto v = RadialProfile::from_basis(BasisSpec::for_alpha(0.0, 5), c);
    EXPECT_GE(mode_quotient(v, p, 0), 9.0 * (1 - 1e-10));
    EXPECT_GE(mode_quotient(v, p, 1), 9.0 * (1 - 1e-10));
  }
}

TEST(Functionals, RoutesAgree) {
  const auto p = P(7, 0.3);
  const auto v = family(FamilyId::thmD, 1.0, 1.3, p);
  for (int k : {0, 2}) {
    const auto e = mode_energies(v, p, k);
    EXPECT_TRUE(e.closed_form);
    EXPECT_TRUE(e.quadrature);
    EXPECT_LT(e.route_discrepancy, 1e-9);
    EXPECT_NEAR(e.log_A.log_abs, std::log(e.A), 1e-10);
  }
}

TEST(Functionals, BetaOnlyAtRadialMode) {
  const InequalityParams p{5, 0.0, 0.5};
  const auto v = family(FamilyId::thmB, 1.0, 1.0, p);
  EXPECT_NO_THROW(mode_energies(v, p, 0));
  EXPECT_THROW(mode_energies(v, p, 1), Error);
}

TEST(Functionals, DivergentIntegral) {
  BasisSpec basis;
  basis.m = 2;
  basis.gamma0 = -3.0;
  basis.decay_q = 1.0;
  const auto v = RadialProfile::from_basis(basis, {1.0, 0.5});
  try {
    mode_energies(v, P(2, 0.0), 0);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::divergence);
  }
}

TEST(Functionals, TestFunctionQuotient) {
  EXPECT_NEAR(test_function_quotient(3), 3.36, 1e-10);
  EXPECT_NEAR(test_function_quotient(2), 0.75, 1e-10);
  for (int N = 2; N <= 8; ++N) {
    EXPECT_NEAR(test_function_quotient(N), constants::to_double(constants::exact_test_function_value(N)),
                1e-10 * N * N);
  }
}

TEST(Functionals, CallableProfileChecksDerivatives) {
  auto good = [](double r) { return ProfileValues{std::exp(-r * r), -2 * r * std::exp(-r * r), (4 * r * r - 2) * std::exp(-r * r)}; };
  const auto v = RadialProfile::from_callable(good, quadrature::DecayHint{1.0, 2.0});
  EXPECT_EQ(v.kind(), ProfileKind::callable);
  const auto ref = family(FamilyId::thmB, 1.0, 1.0, P(4, 0));
  EXPECT_NEAR(mode_quotient(v, P(4, 0), 1), mode_quotient(ref, P(4, 0), 1), 1e-9);
  auto bad = [](double r) { return ProfileValues{std::exp(-r * r), r, 0.0}; };
  EXPECT_THROW(RadialProfile::from_callable(bad, quadrature::DecayHint{1.0, 2.0}), Error);
}

TEST(Functionals, FamilyValidation) {
  ExtremalFamily f{FamilyId::thmC_1, 1.0, -1.0, InequalityParams{4, 0.0, 0.5}};
  EXPECT_THROW(f.validate(), Error);
  ExtremalFamily g{FamilyId::thm12_2, 1.0, 0.0, P(5, 0)};
  EXPECT_THROW(g.validate(), Error);
}
