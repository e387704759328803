#include "cknlab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <thread>

#include "cknlab/constants.hpp"
#include "cknlab/error.hpp"
#include "cknlab/functionals.hpp"
#include "cknlab/quadrature.hpp"
#include "cknlab/report.hpp"
#include "cknlab/special.hpp"
#include "cknlab/variational.hpp"

namespace cknlab::acceptance {
namespace {

namespace cs = constants;
namespace fn = functionals;
namespace va = variational;
using cs::Rational;

// Collects the first failure; later checks still run so counts are complete.
struct Checker {
  int checks = 0;
  int failures = 0;
  std::string first;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      if (failures == 0) first = what;
      ++failures;
    }
  }
  void expect_rel(double got, double want, double tol, const std::string& what) {
    const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-300);
    std::ostringstream os;
    os.precision(17);
    os << what << ": got " << got << ", want " << want << " (rel " << rel << ", tol " << tol << ")";
    expect(rel <= tol, os.str());
  }
  std::string summary() const {
    if (failures == 0) return std::to_string(checks) + " checks";
    return std::to_string(failures) + "/" + std::to_string(checks) + " failed; first: " + first;
  }
};

double sq(double x) { return x * x; }

std::string label(const InequalityParams& p, int k = -1) {
  std::ostringstream os;
  os.precision(17);
  os << "N=" << p.N << " alpha=" << p.alpha;
  if (k >= 0) os << " k=" << k;
  return os.str();
}

// (N, alpha) with N >= 2, alpha > -1, N >= 5 alpha + 5.
InequalityParams random_weighted(std::mt19937_64& rng, int n_max) {
  std::uniform_int_distribution<int> dn(2, n_max);
  const int N = dn(rng);
  const double hi = (N - 5.0) / 5.0;
  std::uniform_real_distribution<double> da(-0.999, hi);
  return InequalityParams{N, da(rng), std::nullopt};
}

fn::RadialProfile random_basis_profile(std::mt19937_64& rng, double alpha, int m) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> c(m);
  for (auto& x : c) x = nd(rng);
  c[0] += 3.0;  // keep the leading shape dominant
  return fn::RadialProfile::from_basis(fn::BasisSpec::for_alpha(alpha, m), c);
}

// ---------------------------------------------------------------- 1

void c1_tables(Checker& ck) {
  const Rational j1[] = {Rational(1, 4), Rational(9, 4), Rational(3969, 676)};
  const Rational j0[] = {Rational(9, 4), Rational(4), Rational(25, 4)};
  for (int N = 2; N <= 4; ++N) {
    const Rational a = cs::exact_mode_quotient_J(N, 1);
    const Rational b = cs::exact_mode_quotient_J(N, 0);
    ck.expect(a == j1[N - 2], "J(" + std::to_string(N) + ",1) = " + cs::to_string(a));
    ck.expect(b == j0[N - 2], "J(" + std::to_string(N) + ",0) = " + cs::to_string(b));
  }
}

// ---------------------------------------------------------------- 2

void c2_mode_infimum(Checker& ck) {
  for (int N = 2; N <= 4; ++N) {
    const auto inf = cs::mode_infimum(cs::Formula::J, {N, 0.0, {}}, 64);
    ck.expect(inf.argmin == 1, "J argmin at N=" + std::to_string(N));
    ck.expect(inf.minimum.exact == cs::exact_mode_quotient_J(N, 1), "J minimum at N=" + std::to_string(N));
  }
  for (int N = 5; N <= 30; ++N) {
    const auto inf = cs::mode_infimum(cs::Formula::J, {N, 0.0, {}}, 64);
    ck.expect(inf.argmin == 0, "J argmin at N=" + std::to_string(N));
    ck.expect(inf.minimum.exact == Rational((N + 1) * (N + 1), 4), "J minimum at N=" + std::to_string(N));
  }
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 200; ++i) {
    const InequalityParams p = random_weighted(rng, 40);
    const auto inf = cs::mode_infimum(cs::Formula::K, p, 64);
    ck.expect(inf.argmin == 0, "K argmin " + label(p));
    ck.expect_rel(inf.minimum.value, sq(p.N + 3.0 * p.alpha + 1.0) / 4.0, 1e-12, "K minimum " + label(p));
  }
}

// ---------------------------------------------------------------- 3

void c3_test_function(Checker& ck) {
  const fn::RadialProfile v = fn::RadialProfile::from_callable(
      [](double r) {
        const double e = std::exp(-r);
        return fn::ProfileValues{e, -e, e};
      },
      quadrature::DecayHint{1.0, 1.0}, false);
  fn::EnergyOptions eo;
  eo.route = fn::EnergyRoute::quadrature_only;
  for (int N = 2; N <= 10; ++N) {
    const double closed =
        double(N) * (N + 4) * sq(double(N) * N - 1) / (4.0 * sq(double(N) * N - N + 4));
    const double quad = fn::mode_quotient(v, {N, 0.0, {}}, 1, eo);
    ck.expect_rel(quad, closed, 1e-10, "test-function quotient N=" + std::to_string(N));
    const double radial = sq(N + 1.0) / 4.0;
    if (N <= 3) ck.expect(quad < radial, "test function below (N+1)^2/4 at N=" + std::to_string(N));
    if (N == 4) ck.expect(quad > radial, "test function above 25/4 at N=4");
  }
}

// ---------------------------------------------------------------- 4

void c4_extremal(Checker& ck) {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> da(0.3, 3.0);
  std::uniform_real_distribution<double> db(0.2, 5.0);
  std::bernoulli_distribution sign(0.5);
  for (int i = 0; i < 30; ++i) {
    const InequalityParams p = random_weighted(rng, 30);
    const double a = sign(rng) ? da(rng) : -da(rng);
    const double b = db(rng);
    const auto prof = fn::extremal_profile({fn::FamilyId::thm12_2, a, b, p});
    const double q = fn::mode_quotient(prof, p, 0);
    std::ostringstream os;
    os << "thm1.2-2 " << label(p) << " a=" << a << " b=" << b;
    ck.expect_rel(q, sq(p.N + 3.0 * p.alpha + 1.0) / 4.0, 1e-8, os.str());
  }
}

// ---------------------------------------------------------------- 5

void c5_one_dim(Checker& ck) {
  for (double a : {-0.9, -0.75, -0.5}) {
    const InequalityParams p{1, a, {}};
    const double q = fn::one_dim_quotient(fn::extremal_profile({fn::FamilyId::thm12_1a, 1.0, 1.0, p}), a);
    ck.expect_rel(q, a * a / 4.0, 1e-8, "family 1a alpha=" + std::to_string(a));
  }
  for (double a : {-0.4, 0.0, 1.0, 2.0}) {
    const InequalityParams p{1, a, {}};
    const double q = fn::one_dim_quotient(fn::extremal_profile({fn::FamilyId::thm12_1b, 1.0, 1.0, p}), a);
    ck.expect_rel(q, sq(3.0 * a + 2.0) / 4.0, 1e-8, "family 1b alpha=" + std::to_string(a));
  }
}

// ---------------------------------------------------------------- 6

void c6_variational(Checker& ck) {
  for (auto [N, want] : {std::pair{5, 9.0}, std::pair{7, 16.0}}) {
    const InequalityParams p{N, 0.0, {}};
    const auto est = va::estimate_mode_constant(p, 0, {4, 8, 16});
    ck.expect_rel(est.result.value, want, 1e-4, "nested estimate " + label(p, 0));
    ck.expect(est.result.converged, "nested estimate converged " + label(p, 0));
  }
  for (auto p : {InequalityParams{5, 0.0, {}}, InequalityParams{7, 0.0, {}}, InequalityParams{12, 1.0, {}},
                 InequalityParams{3, -0.6, {}}}) {
    const auto g = va::build_gram(p, 0, fn::BasisSpec::for_alpha(p.alpha, 1));
    const auto r = va::minimize_quotient(g);
    ck.expect_rel(r.value, sq(p.N + 3.0 * p.alpha + 1.0) / 4.0, 1e-9, "m=1 extremal basis " + label(p, 0));
  }
}

// ---------------------------------------------------------------- 7

void c7_scans(Checker& ck) {
  va::ScanOptions so;
  so.jobs = std::max(1u, std::thread::hardware_concurrency());
  for (int N : {2, 3}) {
    const auto s = va::symmetry_breaking_scan(N, 0.0, 8, so);
    ck.expect(!s.radial, "scan N=" + std::to_string(N) + " verdict " + s.verdict);
    ck.expect(s.rows[1].effective < s.rows[0].full,
              "scan N=" + std::to_string(N) + ": k=1 effective below k=0");
  }
  for (int N : {5, 6, 7}) {
    const auto s = va::symmetry_breaking_scan(N, 0.0, 8, so);
    ck.expect(s.radial, "scan N=" + std::to_string(N) + " verdict " + s.verdict);
  }
}

// ---------------------------------------------------------------- 8

void c8_probe(Checker& ck) {
  report::RunConfig cfg;
  cfg.command = "probe-conjecture";
  cfg.params = InequalityParams{4, 0.0, {}};
  cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
  const auto r = report::cmd_probe_conjecture(cfg);
  const double lo = 3969.0 / 676.0 - 1e-3;
  const double hi = 25.0 / 4.0 + 1e-3;
  const double est = r.variational_estimate.value_or(std::nan(""));
  std::ostringstream os;
  os.precision(17);
  os << "C(4) estimate " << est << " in [" << lo << ", " << hi << "]";
  ck.expect(est >= lo && est <= hi, os.str());
  ck.expect(!r.modes.empty() && r.modes[0].k == 0, "probe has a k=0 row");
  if (!r.modes.empty()) ck.expect(std::abs(r.modes[0].value - 6.25) <= 1e-6, "k=0 row equals 25/4");
  ck.expect(r.lower_bound_exact.value_or("") == "3969/676", "lower bound 3969/676");
}

// ---------------------------------------------------------------- 9

void c9_oracle(Checker& ck) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dp(-0.9, 12.0), dc(0.1, 10.0), dq(0.2, 4.0);
  for (int i = 0; i < 200; ++i) {
    const special::WeightedExpIntegral w{dp(rng), dc(rng), dq(rng)};
    quadrature::IntegrandHandle h;
    h.evaluator = [w](double r) { return std::exp(-w.c * std::pow(r, w.q)); };
    h.weight_exponent = w.p;
    h.decay_hint = quadrature::DecayHint{w.c, w.q};
    const double quad = quadrature::integrate(h).value;
    std::ostringstream os;
    os << "p=" << w.p << " c=" << w.c << " q=" << w.q;
    ck.expect_rel(quad, special::weighted_exp_integral(w), 1e-10, os.str());
  }
}

// ---------------------------------------------------------------- 10

void c10_properties(Checker& ck) {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> dn(2, 8), dk(0, 2);

  // Dilation and amplitude invariance on random basis profiles.
  for (int i = 0; i < 20; ++i) {
    const InequalityParams p{dn(rng), 0.0, {}};
    const int k = dk(rng);
    const auto v = random_basis_profile(rng, 0.0, 4);
    const double q = fn::mode_quotient(v, p, k);
    for (double lam : {0.5, 2.0, 10.0}) {
      ck.expect_rel(fn::mode_quotient(v.dilated(lam), p, k), q, 1e-9,
                    "dilation " + std::to_string(lam) + " " + label(p, k));
    }
    for (double c : {-3.0, 0.1, 7.0}) {
      ck.expect_rel(fn::mode_quotient(v.scaled(c), p, k), q, 1e-12,
                    "amplitude " + std::to_string(c) + " " + label(p, k));
    }
  }

  // Hardy step: ∫v² r^{N+2k-α-4} <= 4/(N+2k-α-3)² ∫v'² r^{N+2k-α-2}.
  for (int i = 0; i < 50; ++i) {
    const InequalityParams p{dn(rng), 0.0, {}};
    const int k = 1 + dk(rng);
    const double d = p.N + 2.0 * k - p.alpha - 3.0;
    const auto v = random_basis_profile(rng, 0.0, 4);
    const auto e = fn::mode_energies(v, p, k);
    const double rhs = 4.0 / (d * d) * e.cross_gradient;
    ck.expect(e.hardy_integral <= rhs * (1.0 + 1e-9), "Hardy step " + label(p, k));
  }

  // Sharpness from below, k = 0.
  for (int i = 0; i < 50; ++i) {
    const InequalityParams p = random_weighted(rng, 20);
    const auto v = random_basis_profile(rng, p.alpha, 3);
    const double q = fn::mode_quotient(v, p, 0);
    ck.expect(q >= sq(p.N + 3.0 * p.alpha + 1.0) / 4.0 - 1e-6, "quotient above C(N,alpha) " + label(p));
  }

  // Gamma recurrence.
  std::uniform_real_distribution<double> dt(1e-6, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double t = dt(rng);
    const double g1 = special::gamma(t + 1.0);
    ck.expect(std::abs(g1 - t * special::gamma(t)) / g1 <= 1e-12, "gamma recurrence t=" + std::to_string(t));
  }

  // Gradient of log Q against central differences.
  auto gradient_check = [&](const va::GramTriple& g, const std::string& what) {
    const int m = static_cast<int>(g.A.rows());
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int s = 0; s < 20; ++s) {
      Eigen::VectorXd y(m);
      for (int i = 0; i < m; ++i) y(i) = nd(rng);
      y(0) += 3.0;
      const auto lq = va::log_quotient(g, y);
      Eigen::VectorXd fd(m);
      for (int i = 0; i < m; ++i) {
        Eigen::VectorXd yp = y, ym = y;
        yp(i) += 1e-6;
        ym(i) -= 1e-6;
        fd(i) = (va::log_quotient(g, yp).value - va::log_quotient(g, ym).value) / 2e-6;
      }
      const double rel = (fd - lq.gradient).norm() / std::max(lq.gradient.norm(), 1e-300);
      ck.expect(rel <= 1e-5, what + " gradient check, rel " + std::to_string(rel));
    }
  };
  {
    va::GramOptions full;
    full.form = va::GramForm::full;
    gradient_check(va::build_gram({5, 0.0, {}}, 0, fn::BasisSpec::for_alpha(0.0, 5)), "plain N=5 k=0");
    gradient_check(va::build_gram({3, 0.0, {}}, 1, fn::BasisSpec::for_alpha(0.0, 4), full), "plain N=3 k=1");
    gradient_check(va::build_conditioned_gram({4, 0.0, {}}, 1, fn::BasisSpec::for_alpha(0.0, 8), full),
                   "conditioned N=4 k=1");
  }

  // Basis nesting and the per-mode lower bound.
  for (auto [p, k] : {std::pair{InequalityParams{5, 0.0, {}}, 0}, std::pair{InequalityParams{2, 0.0, {}}, 1},
                      std::pair{InequalityParams{4, 0.0, {}}, 1}, std::pair{InequalityParams{12, 1.0, {}}, 0},
                      std::pair{InequalityParams{6, 0.2, {}}, 0}}) {
    const auto est = va::estimate_mode_constant(p, k, {2, 4, 8, 12});
    ck.expect(est.trace_monotone, "nested trace non-increasing " + label(p, k));
    for (std::size_t i = 1; i < est.trace.size(); ++i) {
      ck.expect(est.trace[i].value <= est.trace[i - 1].value + 1e-10, "trace step " + label(p, k));
    }
    if (k == 0) {
      ck.expect(est.result.value >= sq(p.N + 3.0 * p.alpha + 1.0) / 4.0 - 1e-6, "lower bound " + label(p, k));
    }
  }
}

struct Spec {
  const char* name;
  double budget;
  void (*fn)(Checker&);
};

const Spec kSpecs[kCriterionCount] = {
    {"closed-form tables", 1e-3, c1_tables},
    {"mode infimum", 1.0, c2_mode_infimum},
    {"test-function quotient", 1.0, c3_test_function},
    {"extremal sharpness N>=2", 5.0, c4_extremal},
    {"extremal sharpness N=1", 2.0, c5_one_dim},
    {"variational recovery", 10.0, c6_variational},
    {"symmetry-breaking verdicts", 30.0, c7_scans},
    {"conjecture probe", 60.0, c8_probe},
    {"quadrature oracle", 5.0, c9_oracle},
    {"property suite", 30.0, c10_properties},
};

}  // namespace

CriterionResult run_criterion(int id) {
  if (id < 1 || id > kCriterionCount) fail(ErrorKind::domain, "no criterion " + std::to_string(id));
  const Spec& s = kSpecs[id - 1];
  CriterionResult r;
  r.id = id;
  r.name = s.name;
  r.budget = s.budget;
  Checker ck;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    s.fn(ck);
  } catch (const std::exception& e) {
    ck.expect(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.passed = ck.failures == 0 && r.seconds < r.budget;
  r.detail = ck.summary();
  if (ck.failures == 0 && r.seconds >= r.budget) r.detail += "; over the runtime budget";
  return r;
}

std::vector<CriterionResult> run_all() {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id));
  return out;
}

std::string format_line(const CriterionResult& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s %2d %-28s (%.4g s / %g s)  ", c.passed ? "PASS" : "FAIL", c.id,
                c.name.c_str(), c.seconds, c.budget);
  return buf + c.detail;
}

}  // namespace cknlab::acceptance
