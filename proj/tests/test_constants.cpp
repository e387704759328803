#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cknlab/constants.hpp"
#include "cknlab/error.hpp"

using namespace cknlab;
using namespace cknlab::constants;

namespace {

// Independent evaluation of the per-mode quotient in exact integers.
Rational oracle_K(long N, long a, long k) {
  const Rational t = N + 2 * k - a - 3;
  const Rational s = N + 2 * k + 3 * a + 1;
  const Rational d = t * t + 4 * (a + 1) * k;
  return t * t * t * t * s * s / (4 * d * d);
}

InequalityParams P(int N, double a) { return {N, a, std::nullopt}; }

}  // namespace

TEST(ModeQuotientJ, ExactTable) {
  EXPECT_EQ(to_string(exact_mode_quotient_J(3, 1)), "9/4");
  EXPECT_EQ(to_string(exact_mode_quotient_J(3, 2)), "64/9");
  EXPECT_EQ(to_string(exact_mode_quotient_J(4, 1)), "3969/676");
  EXPECT_EQ(to_string(exact_mode_quotient_J(2, 1)), "1/4");
  EXPECT_EQ(to_string(exact_mode_quotient_J(9, 0)), "25");
  for (int N = 2; N <= 20; ++N) {
    for (int k = 0; k <= 30; ++k) {
      if (N == 3 && k == 0) continue;
      EXPECT_EQ(exact_mode_quotient_J(N, k), oracle_K(N, 0, k)) << N << " " << k;
      EXPECT_DOUBLE_EQ(mode_quotient_J(N, k).value, to_double(oracle_K(N, 0, k)));
    }
  }
}

TEST(ModeQuotientJ, ThreeDimensionalRadialMode) {
  // (N+2k-3) vanishes at N=3, k=0; the radial mode takes the value 4.
  EXPECT_EQ(to_string(exact_mode_quotient_J(3, 0)), "4");
}

TEST(ModeQuotientK, ReducesToJAtZeroWeight) {
  for (int N = 2; N <= 12; ++N)
    for (int k = 0; k <= 12; ++k)
      EXPECT_EQ(exact_mode_quotient_K(P(N, 0), k), exact_mode_quotient_J(N, k)) << N << " " << k;
}

TEST(ModeQuotientK, IntegerWeights) {
  for (int a = 1; a <= 3; ++a)
    for (int N = 5 * a + 5; N <= 5 * a + 15; ++N)
      for (int k = 0; k <= 10; ++k)
        EXPECT_EQ(exact_mode_quotient_K(P(N, a), k), oracle_K(N, a, k));
  EXPECT_EQ(to_string(exact_mode_quotient_K(P(12, 1), 1)), "625/9");
}

TEST(ModeInfimum, RadialAboveThreshold) {
  for (auto [N, a] : std::vector<std::pair<int, double>>{{5, 0}, {9, 0}, {12, 1}, {10, 1}, {20, 2}, {6, 0.2}}) {
    const auto inf = mode_infimum(Formula::K, P(N, a));
    EXPECT_EQ(inf.argmin, 0) << N << " " << a;
    EXPECT_TRUE(inf.tail_verified);
    EXPECT_NEAR(inf.minimum.value, sharp_constant_closed_form(P(N, a)), 1e-12 * inf.minimum.value);
  }
}

TEST(ModeInfimum, SymmetryBreakingBelowFive) {
  EXPECT_EQ(mode_infimum(Formula::J, P(2, 0)).argmin, 1);
  EXPECT_EQ(mode_infimum(Formula::J, P(3, 0)).argmin, 1);
  EXPECT_EQ(mode_infimum(Formula::J, P(4, 0)).argmin, 1);
  EXPECT_EQ(mode_infimum(Formula::J, P(3, 0)).minimum.exact, Rational(9, 4));
}

TEST(ModeInfimum, RandomWeightsMatchBruteForce) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> ua(-0.9, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double a = ua(rng);
    const int N = std::max(2, static_cast<int>(std::ceil(5 * a + 5))) + static_cast<int>(rng() % 6);
    const auto inf = mode_infimum(Formula::K, P(N, a), 200);
    double best = 1e300;
    for (int k = 0; k <= 200; ++k) best = std::min(best, to_double(exact_mode_quotient_K(P(N, a), k)));
    EXPECT_DOUBLE_EQ(inf.minimum.value, best);
    EXPECT_EQ(inf.argmin, 0);
  }
}

TEST(Monotone, FirstModeDominatesRadial) {
  for (double a = -0.9; a <= 4.0; a += 0.1) {
    // y = N - alpha - 1 with N >= 2 and N >= 5 alpha + 5
    const double y0 = std::max(4 * (a + 1), 1 - a);
    for (double y = y0; y <= y0 + 40; y += 0.5) {
      EXPECT_GE(monotone::first_mode_reduced_gap(a, y), -1e-9) << a << " " << y;
      EXPECT_GE(monotone::first_mode_quartic_gap(a, y), -1e-12 * std::pow(y + 4 * a + 4, 6)) << a << " " << y;
    }
  }
}

TEST(Monotone, DerivativeFactors) {
  for (int N = 2; N <= 4; ++N) {
    for (double x = 2; x <= 100; x += 0.25) {
      EXPECT_GT(monotone::g_prime(N, x), 0.0);
      EXPECT_GT(monotone::h_prime(N, x), 0.0);
      const double h = 1e-6;
      const double fd = (monotone::g(N, x + h) - monotone::g(N, x - h)) / (2 * h);
      EXPECT_NEAR(monotone::g_prime(N, x), fd, 1e-6 * std::abs(fd) + 1e-9);
      EXPECT_NEAR(monotone::f(N, x), monotone::g(N, x) * monotone::h(N, x), 1e-12 * monotone::f(N, x));
    }
  }
}

TEST(Monotone, TailCertificate) {
  EXPECT_GE(sampled_tail_increment(P(5, 0)), -1e-12);
  EXPECT_GE(sampled_tail_increment(P(12, 1)), -1e-12);
  EXPECT_TRUE(mode_infimum(Formula::J, P(7, 0)).tail_verified);
}

TEST(SharpConstant, CaseTable) {
  EXPECT_DOUBLE_EQ(sharp_constant_closed_form(P(5, 0)), 9.0);
  EXPECT_DOUBLE_EQ(sharp_constant_closed_form(P(12, 1)), 64.0);
  EXPECT_DOUBLE_EQ(sharp_constant_closed_form(P(1, -0.75)), 0.140625);
  EXPECT_DOUBLE_EQ(sharp_constant_closed_form(P(1, -0.5)), 0.0625);
  EXPECT_DOUBLE_EQ(sharp_constant_closed_form(P(1, 1)), 6.25);
  EXPECT_DOUBLE_EQ(sharp_constant_closed_form(P(1, 0)), 1.0);
  EXPECT_EQ(exact_sharp_constant(P(10, 0.5)), Rational(625, 16));
}

TEST(SharpConstant, UnsupportedRegimeNamesCondition) {
  for (auto p : {P(3, 1), P(4, 0), P(2, 0), P(1, -1.5)}) {
    try {
      sharp_constant_closed_form(p);
      ADD_FAILURE() << p.describe();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::unsupported_regime);
      EXPECT_FALSE(std::string(e.what()).empty());
    }
  }
  try {
    sharp_constant_closed_form(P(3, 1));
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("N >= 5*alpha + 5"), std::string::npos);
  }
}

TEST(Bounds, LowAndUpperValues) {
  const auto b2 = symmetry_breaking_bounds(2);
  EXPECT_EQ(b2.exact_lower, Rational(1, 4));
  EXPECT_EQ(b2.exact_upper, Rational(3, 4));
  EXPECT_FALSE(b2.conjecture_open);
  const auto b3 = symmetry_breaking_bounds(3);
  EXPECT_EQ(b3.exact_lower, Rational(9, 4));
  EXPECT_EQ(b3.exact_upper, Rational(84, 25));
  const auto b4 = symmetry_breaking_bounds(4);
  EXPECT_EQ(to_string(b4.exact_lower), "3969/676");
  EXPECT_EQ(b4.exact_upper, Rational(25, 4));
  EXPECT_TRUE(b4.conjecture_open);
  for (int N = 2; N <= 3; ++N) {
    const auto b = symmetry_breaking_bounds(N);
    EXPECT_LT(b.lower, b.upper);
    EXPECT_EQ(b.exact_lower, exact_mode_quotient_J(N, 1));
    EXPECT_EQ(b.exact_upper, exact_test_function_value(N));
  }
  EXPECT_THROW(symmetry_breaking_bounds(5), Error);
}

TEST(Bounds, TestFunctionValue) {
  for (long N = 2; N <= 10; ++N) {
    const Rational expected = Rational(N * (N + 4) * (N * N - 1) * (N * N - 1), 4 * (N * N - N + 4) * (N * N - N + 4));
    EXPECT_EQ(exact_test_function_value(static_cast<int>(N)), expected);
  }
}

TEST(DnGeneral, AgreesWithKAtZeroBeta) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ua(-0.9, 2.0);
  for (int i = 0; i < 50; ++i) {
    const double a = ua(rng);
    const int N = std::max(2, static_cast<int>(std::ceil(5 * a + 5))) + static_cast<int>(rng() % 4);
    InequalityParams p{N, a, 0.0};
    EXPECT_NEAR(dn_general_lower_bound(p), mode_infimum(Formula::K, P(N, a)).minimum.value,
                1e-12 * mode_infimum(Formula::K, P(N, a)).minimum.value);
  }
}

TEST(References, ContainsNeighbouringConstants) {
  const auto refs = reference_constants(P(5, 0));
  ASSERT_TRUE(refs.count("second_order_hyup"));
  EXPECT_DOUBLE_EQ(*refs.at("second_order_hyup").value, 9.0);
  ASSERT_TRUE(refs.count("first_order_hyup"));
  EXPECT_DOUBLE_EQ(*refs.at("first_order_hyup").value, 4.0);
  EXPECT_DOUBLE_EQ(*refs.at("second_order_heisenberg").value, 12.25);
}

TEST(RationalHelpers, DoubleRoundTrip) {
  for (double x : {0.1, -2.75, 1e-300, 123456.789}) EXPECT_EQ(to_double(to_rational(x)), x);
  EXPECT_EQ(to_string(Rational(-3, 2)), "-3/2");
  EXPECT_EQ(parse_formula("DN"), Formula::DnGeneral);
  EXPECT_THROW(parse_formula("Q"), Error);
}
