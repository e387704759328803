#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "cknlab/constants.hpp"
#include "cknlab/error.hpp"
#include "cknlab/variational.hpp"

namespace cknlab::variational {

Estimate estimate_mode_constant(const InequalityParams& params, int k,
                                const std::vector<int>& basis_sizes, const EstimateOptions& opts) {
  if (basis_sizes.empty()) fail(ErrorKind::domain, "basis size list is empty");
  for (std::size_t i = 0; i < basis_sizes.size(); ++i) {
    if (basis_sizes[i] < 1) fail(ErrorKind::domain, "basis sizes must be >= 1");
    if (i > 0 && basis_sizes[i] <= basis_sizes[i - 1]) {
      fail(ErrorKind::domain, "basis sizes must be strictly increasing");
    }
  }
  BasisSpec basis = BasisSpec::for_alpha(params.alpha, basis_sizes.front());
  if (opts.gamma0) basis.gamma0 = *opts.gamma0;

  GramOptions gopts;
  gopts.form = opts.form;

  Estimate est;
  std::optional<Eigen::VectorXd> warm;
  for (int m : basis_sizes) {
    basis.m = m;
    const GramTriple g = build_conditioned_gram(params, k, basis, gopts);
    MinimizeOptions mo = opts.minimize;
    if (warm) {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
      y.head(warm->size()) = *warm;
      mo.warm_start = y;
    }
    MinimizationResult r = minimize_quotient(g, mo);
    TracePoint tp{m, r.value, r.converged, r.iterations, r.gradient_norm};
    if (!est.trace.empty() && tp.value > est.trace.back().value + 1e-10) est.trace_monotone = false;
    est.trace.push_back(tp);
    warm = r.y;
    est.result = std::move(r);
  }
  return est;
}

namespace {

double hardy_factor(const InequalityParams& p, int k) {
  if (k == 0) return 1.0;
  const double d = p.N + 2.0 * k - p.alpha - 3.0;
  return 1.0 + 4.0 * (p.alpha + 1.0) * k / (d * d);
}

ScanRow scan_row(const InequalityParams& params, int k, const ScanOptions& opts) {
  ScanRow row;
  row.k = k;
  row.hardy_factor = hardy_factor(params, k);
  EstimateOptions eo;
  eo.minimize = opts.minimize;
  eo.form = GramForm::hardy_free;
  const Estimate raw = estimate_mode_constant(params, k, opts.basis_sizes, eo);
  row.raw = raw.result.value;
  row.effective = row.raw / (row.hardy_factor * row.hardy_factor);
  if (k == 0) {
    row.full = row.raw;
    row.converged = raw.result.converged;
    row.trace = raw.trace;
  } else {
    eo.form = GramForm::full;
    const Estimate full = estimate_mode_constant(params, k, opts.basis_sizes, eo);
    row.full = full.result.value;
    row.converged = raw.result.converged && full.result.converged;
    row.trace = full.trace;
  }
  if (params.alpha > -1.0) {
    row.formula = constants::mode_quotient_K(InequalityParams{params.N, params.alpha, {}}, k).value;
  }
  return row;
}

int argmin_rows(const std::vector<ScanRow>& rows, double ScanRow::*field) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(rows.size()); ++i) {
    const double v = rows[i].*field;
    const double b = rows[best].*field;
    if (v < b - 1e-9 * std::abs(b)) best = i;
  }
  return best;
}

}  // namespace

ScanResult symmetry_breaking_scan(int N, double alpha, int k_max, const ScanOptions& opts) {
  if (N < 2) fail(ErrorKind::domain, "symmetry-breaking scan needs N >= 2");
  if (k_max < 0) fail(ErrorKind::domain, "k_max must be >= 0");
  if (opts.jobs < 1) fail(ErrorKind::domain, "jobs must be >= 1");
  const InequalityParams params{N, alpha, std::nullopt};
  params.validate();

  ScanResult out;
  out.params = params;
  out.rows.resize(static_cast<std::size_t>(k_max) + 1);
  std::vector<std::exception_ptr> errors(out.rows.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k <= k_max; k = next++) {
      try {
        out.rows[k] = scan_row(params, k, opts);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int threads = std::min(opts.jobs, k_max + 1);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  out.argmin_full = argmin_rows(out.rows, &ScanRow::full);
  out.argmin_effective = argmin_rows(out.rows, &ScanRow::effective);
  out.radial = out.argmin_full == 0;
  out.verdict = out.radial ? "radial" : "symmetry-broken at k=" + std::to_string(out.argmin_full);
  out.conjecture_open = N == 4 && alpha == 0.0;
  return out;
}

ProbeResult probe_conjecture(int N, const ScanOptions& opts, int k_max) {
  if (N != 4) {
    fail(ErrorKind::domain,
         "the conjecture probe covers N = 4 only; use the minimize command for other dimensions");
  }
  ProbeResult p;
  p.scan = symmetry_breaking_scan(4, 0.0, k_max, opts);
  p.estimate = p.scan.rows[p.scan.argmin_full].full;
  p.radial_value = p.scan.rows[0].full;
  p.test_profile = functionals::test_function_quotient(4);
  const auto bounds = constants::symmetry_breaking_bounds(4);
  p.lower_bound = bounds.lower;
  p.lower_bound_exact = constants::to_string(bounds.exact_lower);
  p.radial_bound = bounds.upper;
  p.banner =
      "numerical evidence only: variational upper estimates over a finite basis, not a proof";
  return p;
}

}  // namespace cknlab::variational
