#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cknlab/acceptance.hpp"
#include "cknlab/constants.hpp"
#include "cknlab/error.hpp"
#include "cknlab/functionals.hpp"
#include "cknlab/report.hpp"
#include "cknlab/variational.hpp"

namespace cknlab::report {
namespace {

namespace cs = constants;
namespace fn = functionals;
namespace va = variational;

using D = Diagnostic;

constexpr double kAgreementTol = 1e-8;

SharpConstantReport base(const RunConfig& cfg) {
  cfg.params.validate();
  cfg.quadrature.validate();
  SharpConstantReport r;
  r.command = cfg.command;
  r.params = cfg.params;
  r.seed = cfg.seed;
  return r;
}

Bounds to_bounds(const cs::BoundsReport& b) {
  Bounds out;
  out.lower = b.lower;
  out.upper = b.upper;
  out.conjectured = b.conjectured;
  out.exact_lower = cs::to_string(b.exact_lower);
  out.exact_upper = cs::to_string(b.exact_upper);
  out.exact_conjectured = cs::to_string(b.exact_conjectured);
  out.conjecture_open = b.conjecture_open;
  return out;
}

bool bounds_apply(const InequalityParams& p) {
  return p.N >= 2 && p.N <= 4 && p.alpha == 0.0 && !p.beta;
}

void check_agreement(SharpConstantReport& r, double closed, double numeric, double tol) {
  const double rel = std::abs(closed - numeric) / std::max(std::abs(closed), 1e-300);
  r.diagnostics["relative_discrepancy"] = D(rel);
  if (rel > tol) {
    r.discrepancy = true;
    r.add_flag("discrepancy");
    std::ostringstream os;
    os << "closed form " << closed << " and numerical value " << numeric << " differ by relative "
       << rel;
    r.warnings.push_back(os.str());
    r.status = exit_code(ErrorKind::consistency);
  }
}

fn::EnergyOptions energy_options(const RunConfig& cfg) {
  fn::EnergyOptions eo;
  eo.spec = cfg.quadrature;
  return eo;
}

void record_energy(SharpConstantReport& r, const fn::ModeEnergy& e) {
  r.diagnostics["err_est"] = D(e.err_est);
  r.diagnostics["route_discrepancy"] = D(e.route_discrepancy);
  r.diagnostics["closed_form_route"] = D(e.closed_form);
  r.diagnostics["quadrature_route"] = D(e.quadrature);
}

va::MinimizeOptions minimize_options(const RunConfig& cfg) {
  va::MinimizeOptions mo;
  mo.seed = cfg.seed;
  return mo;
}

std::optional<double> known_family_value(fn::FamilyId id, const InequalityParams& p, int k) {
  if (k != 0) return std::nullopt;
  const double a = p.alpha;
  if (p.N == 1) {
    if (id == fn::FamilyId::thm12_1a && a > -1.0 && a <= -0.5) return a * a / 4.0;
    if (id == fn::FamilyId::thm12_1b && a > -0.5) return (3.0 * a + 2.0) * (3.0 * a + 2.0) / 4.0;
    return std::nullopt;
  }
  if ((id == fn::FamilyId::thm12_2 || id == fn::FamilyId::thm12_1b) && p.weighted_case_holds() &&
      p.beta_or_zero() == 0.0) {
    return (p.N + 3.0 * a + 1.0) * (p.N + 3.0 * a + 1.0) / 4.0;
  }
  if (id == fn::FamilyId::thmA && a == 0.0 && !p.beta && p.N >= 5) {
    return (p.N + 1.0) * (p.N + 1.0) / 4.0;
  }
  return std::nullopt;
}

std::vector<double> read_coeffs(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open coefficient file " + path);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    for (char& c : tok)
      if (c == ',' || c == ';') c = ' ';
    std::istringstream ts(tok);
    std::string part;
    while (ts >> part) {
      if (part[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        break;
      }
      try {
        out.push_back(std::stod(part));
      } catch (const std::exception&) {
        fail(ErrorKind::io, path + ": not a number: " + part);
      }
    }
  }
  if (out.empty()) fail(ErrorKind::domain, path + ": no coefficients");
  return out;
}

}  // namespace

SharpConstantReport cmd_constants(const RunConfig& cfg) {
  SharpConstantReport r = base(cfg);
  const InequalityParams& p = cfg.params;

  std::optional<Error> unsupported;
  try {
    const cs::Rational exact = cs::exact_sharp_constant(p);
    r.closed_form = cs::to_double(exact);
    r.closed_form_exact = cs::to_string(exact);
    r.provenance["closed_form"] = "sharp-constant case table";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::unsupported_regime) throw;
    unsupported = e;
    r.warnings.push_back(e.what());
  }
  if (bounds_apply(p)) {
    r.bounds = to_bounds(cs::symmetry_breaking_bounds(p.N));
    r.provenance["bounds"] = "per-mode lower bound and test-function upper bound";
    if (r.bounds->conjecture_open) r.add_flag("conjecture-open");
  }
  if (!r.closed_form && !r.bounds) throw *unsupported;

  for (const auto& [name, ref] : cs::reference_constants(p)) {
    r.references.push_back(Reference{name, ref.value, ref.precondition_met, ref.note});
  }
  r.provenance["references"] = "closed forms of neighbouring inequalities";

  if (r.closed_form) {
    // Quadrature check on the extremal family.
    if (p.N == 1) {
      const auto id = p.alpha <= -0.5 ? fn::FamilyId::thm12_1a : fn::FamilyId::thm12_1b;
      const auto prof = fn::extremal_profile({id, 1.0, 1.0, p});
      r.quadrature_value = fn::one_dim_quotient(prof, p.alpha, energy_options(cfg));
      r.provenance["quadrature_value"] = std::string("one-dimensional quotient of ") + fn::to_string(id);
    } else {
      const auto prof = fn::extremal_profile({fn::FamilyId::thm12_2, 1.0, 1.0, p});
      const auto e = fn::mode_energies(prof, p, 0, energy_options(cfg));
      record_energy(r, e);
      r.quadrature_value = fn::quotient(e);
      r.provenance["quadrature_value"] = "radial quotient of the thm1.2-2 family";
    }
    check_agreement(r, *r.closed_form, *r.quadrature_value, kAgreementTol);
    if (p.N >= 2) {
      const auto inf = cs::mode_infimum(cs::Formula::K, p, 64);
      r.diagnostics["tail_verified"] = D(inf.tail_verified);
      r.diagnostics["mode_argmin"] = D(static_cast<std::int64_t>(inf.argmin));
    }
  }
  return r;
}

SharpConstantReport cmd_mode_scan(const RunConfig& cfg) {
  SharpConstantReport r = base(cfg);
  if (cfg.k_max < 2) fail(ErrorKind::domain, "mode-scan needs kmax >= 2");
  std::string name = cfg.formula;
  if (name.empty()) name = (cfg.params.alpha == 0.0 && !cfg.params.beta) ? "J" : "K";
  const cs::Formula formula = cs::parse_formula(name);
  if (formula == cs::Formula::J && cfg.params.alpha != 0.0) {
    fail(ErrorKind::domain, "formula J is the alpha = 0 case; use --formula K for alpha != 0");
  }
  const auto inf = cs::mode_infimum(formula, cfg.params, cfg.k_max);
  for (const auto& q : inf.scanned) {
    ModeRow row;
    row.k = q.k;
    row.value = q.value;
    row.formula = cs::to_string(q.exact);
    row.argmin = q.k == inf.argmin;
    row.tail_verified = inf.tail_verified;
    r.modes.push_back(row);
  }
  r.argmin = inf.argmin;
  r.closed_form = inf.minimum.value;
  r.closed_form_exact = cs::to_string(inf.minimum.exact);
  r.diagnostics["formula"] = D(std::string(cs::to_string(formula)));
  r.diagnostics["hypotheses_hold"] = D(inf.hypotheses_hold);
  r.diagnostics["tail_verified"] = D(inf.tail_verified);
  r.diagnostics["worst_tail_increment"] = D(inf.worst_tail_increment);
  r.provenance["modes"] = std::string("exact per-mode quotient ") + cs::to_string(formula);
  if (!inf.tail_verified) {
    r.warnings.push_back("tail beyond kmax not certified: the monotone-tail hypotheses do not hold or sampling failed");
  }
  return r;
}

SharpConstantReport cmd_quotient(const RunConfig& cfg) {
  SharpConstantReport r = base(cfg);
  const InequalityParams& p = cfg.params;
  const int selectors = (cfg.test_function ? 1 : 0) + (cfg.family ? 1 : 0) + (cfg.coeffs_path.empty() ? 0 : 1);
  if (selectors != 1) {
    fail(ErrorKind::usage, "quotient needs exactly one of --test-function, --family, --coeffs");
  }
  if (cfg.test_function) {
    const double v = fn::test_function_quotient(p.N, cfg.quadrature);
    const cs::Rational exact = cs::exact_test_function_value(p.N);
    r.k = 1;
    r.quadrature_value = v;
    r.closed_form = cs::to_double(exact);
    r.closed_form_exact = cs::to_string(exact);
    r.provenance["quadrature_value"] = "mode quotient of v = exp(-r) at k = 1";
    r.provenance["closed_form"] = "N(N+4)(N^2-1)^2 / (4 (N^2-N+4)^2)";
    check_agreement(r, *r.closed_form, v, 1e-10);
    r.diagnostics["below_radial_value"] = D(v < (p.N + 1.0) * (p.N + 1.0) / 4.0);
    return r;
  }
  if (cfg.family) {
    const fn::FamilyId id = fn::parse_family(*cfg.family);
    const fn::ExtremalFamily fam{id, cfg.a, cfg.b, p};
    const auto prof = fn::extremal_profile(fam);
    if (p.N == 1) {
      r.k = 0;
      r.quadrature_value = fn::one_dim_quotient(prof, p.alpha, energy_options(cfg));
    } else {
      r.k = cfg.k;
      const auto e = fn::mode_energies(prof, p, cfg.k, energy_options(cfg));
      record_energy(r, e);
      r.quadrature_value = fn::quotient(e);
    }
    r.provenance["quadrature_value"] = std::string("energies of the ") + fn::to_string(id) + " family";
    if (auto expected = known_family_value(id, p, *r.k)) {
      r.closed_form = *expected;
      r.provenance["closed_form"] = "sharp constant the family attains";
      check_agreement(r, *expected, *r.quadrature_value, kAgreementTol);
    }
    return r;
  }
  const auto coeffs = read_coeffs(cfg.coeffs_path);
  const auto basis = fn::BasisSpec::for_alpha(p.alpha, static_cast<int>(coeffs.size()));
  const auto prof = fn::RadialProfile::from_basis(basis, coeffs);
  r.k = cfg.k;
  const auto e = fn::mode_energies(prof, p, cfg.k, energy_options(cfg));
  record_energy(r, e);
  r.quadrature_value = fn::quotient(e);
  r.provenance["quadrature_value"] = "energies of the basis expansion read from " + cfg.coeffs_path;
  return r;
}

SharpConstantReport cmd_minimize(const RunConfig& cfg) {
  SharpConstantReport r = base(cfg);
  const InequalityParams& p = cfg.params;
  if (p.beta && *p.beta != 0.0) fail(ErrorKind::domain, "minimize supports beta = 0 only");
  const std::vector<int> sizes = cfg.basis_sizes.empty() ? std::vector<int>{4, 8, 16} : cfg.basis_sizes;
  va::EstimateOptions eo;
  eo.minimize = minimize_options(cfg);
  const va::Estimate est = va::estimate_mode_constant(p, cfg.k, sizes, eo);
  r.k = cfg.k;
  r.variational_estimate = est.result.value;
  for (const auto& t : est.trace) {
    r.trace.push_back(TraceRow{t.m, t.value, t.converged, t.iterations, t.gradient_norm});
  }
  r.provenance["variational_estimate"] = "quotient minimized over nested exponential-polynomial bases";
  r.diagnostics["converged"] = D(est.result.converged);
  r.diagnostics["iterations"] = D(static_cast<std::int64_t>(est.result.iterations));
  r.diagnostics["gradient_norm"] = D(est.result.gradient_norm);
  r.diagnostics["basis_size"] = D(static_cast<std::int64_t>(est.result.basis_size));
  r.diagnostics["trace_monotone"] = D(est.trace_monotone);
  r.diagnostics["form"] = D(std::string(va::to_string(eo.form)));
  for (const auto& w : est.result.warnings) r.warnings.push_back(w);

  try {
    const cs::Rational exact = cs::exact_sharp_constant(p);
    r.closed_form = cs::to_double(exact);
    r.closed_form_exact = cs::to_string(exact);
    r.provenance["closed_form"] = "sharp-constant case table";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::unsupported_regime) throw;
  }
  if (bounds_apply(p)) {
    r.bounds = to_bounds(cs::symmetry_breaking_bounds(p.N));
    if (r.bounds->conjecture_open) r.add_flag("conjecture-open");
  }
  if (p.alpha > -1.0 && p.N >= 2) {
    const auto lower = cs::mode_quotient_K(InequalityParams{p.N, p.alpha, {}}, cfg.k);
    r.lower_bound = lower.value;
    r.lower_bound_exact = cs::to_string(lower.exact);
    r.provenance["lower_bound"] = "per-mode lower bound K(N, alpha, k)";
  }

  // An upper estimate may not fall below a proven lower bound.
  const double v = est.result.value;
  auto below = [&](double lo, const char* what) {
    if (v < lo - 1e-6 * std::max(1.0, std::abs(lo))) {
      r.discrepancy = true;
      r.add_flag("discrepancy");
      r.warnings.push_back(std::string("estimate falls below the ") + what);
      r.status = exit_code(ErrorKind::consistency);
    }
  };
  if (r.closed_form) below(*r.closed_form, "closed-form constant");
  if (r.lower_bound) below(*r.lower_bound, "per-mode lower bound");
  if (r.bounds) below(r.bounds->lower, "lower bound");
  if (!est.result.converged && r.status == 0) r.status = exit_code(ErrorKind::non_convergence);
  return r;
}

SharpConstantReport cmd_probe_conjecture(const RunConfig& cfg) {
  SharpConstantReport r = base(cfg);
  if (cfg.params.N != 4) {
    fail(ErrorKind::domain,
         "probe-conjecture covers N = 4 only; use the minimize command for N = " +
             std::to_string(cfg.params.N));
  }
  va::ScanOptions so;
  so.basis_sizes = cfg.basis_sizes.empty() ? std::vector<int>{8, 16, 24} : cfg.basis_sizes;
  so.jobs = cfg.jobs;
  so.minimize = minimize_options(cfg);
  const va::ProbeResult pr = va::probe_conjecture(4, so, cfg.k_max);
  const auto tail = cs::mode_infimum(cs::Formula::J, InequalityParams{4, 0.0, {}}, cfg.k_max);

  r.params = InequalityParams{4, 0.0, {}};
  bool all_converged = true;
  for (const auto& row : pr.scan.rows) {
    ModeRow m;
    m.k = row.k;
    m.value = row.full;
    if (row.formula) m.formula = cs::to_string(cs::exact_mode_quotient_J(4, row.k));
    m.argmin = row.k == pr.scan.argmin_full;
    m.tail_verified = tail.tail_verified;
    m.raw = row.raw;
    m.effective = row.effective;
    m.hardy_factor = row.hardy_factor;
    m.converged = row.converged;
    all_converged = all_converged && row.converged;
    r.modes.push_back(m);
  }
  r.argmin = pr.scan.argmin_full;
  r.variational_estimate = pr.estimate;
  r.verdict = pr.scan.verdict;
  r.banner = pr.banner;
  r.lower_bound = pr.lower_bound;
  r.lower_bound_exact = pr.lower_bound_exact;
  r.bounds = to_bounds(cs::symmetry_breaking_bounds(4));
  if (pr.scan.conjecture_open) r.add_flag("conjecture-open");
  r.add_flag("numerical-evidence-only");
  r.diagnostics["radial_value"] = D(pr.radial_value);
  r.diagnostics["test_profile_k1"] = D(pr.test_profile);
  r.diagnostics["converged"] = D(all_converged);
  r.diagnostics["argmin_effective"] = D(static_cast<std::int64_t>(pr.scan.argmin_effective));
  r.provenance["variational_estimate"] = "minimum over modes of the full per-mode quotient estimates";
  r.provenance["lower_bound"] = "J(4, 1)";
  r.provenance["modes.formula"] = "exact per-mode lower bound J(4, k)";
  const double lo = r.bounds->lower - 1e-3;
  const double hi = r.bounds->upper + 1e-3;
  if (!(pr.estimate >= lo && pr.estimate <= hi)) {
    r.discrepancy = true;
    r.add_flag("discrepancy");
    r.warnings.push_back("estimate outside the bracket [J(4,1), 25/4]");
    r.status = exit_code(ErrorKind::consistency);
  }
  if (!all_converged) {
    r.warnings.push_back("some per-mode minimizations did not reach the gradient tolerance");
    if (r.status == 0) r.status = exit_code(ErrorKind::non_convergence);
  }
  return r;
}

SharpConstantReport cmd_selftest(const RunConfig& cfg) {
  SharpConstantReport r;
  r.command = cfg.command.empty() ? "selftest" : cfg.command;
  r.params = cfg.params;
  r.seed = cfg.seed;
  std::int64_t failed = 0;
  for (const auto& c : acceptance::run_all()) {
    char key[16];
    std::snprintf(key, sizeof key, "criterion_%02d", c.id);
    r.diagnostics[key] = D(acceptance::format_line(c));
    if (!c.passed) {
      ++failed;
      r.warnings.push_back(acceptance::format_line(c));
    }
  }
  r.diagnostics["failed"] = D(failed);
  if (failed > 0) r.status = exit_code(ErrorKind::consistency);
  return r;
}

SharpConstantReport run(const RunConfig& cfg) {
  const std::string& c = cfg.command;
  if (c == "constants") return cmd_constants(cfg);
  if (c == "mode-scan") return cmd_mode_scan(cfg);
  if (c == "quotient") return cmd_quotient(cfg);
  if (c == "minimize") return cmd_minimize(cfg);
  if (c == "probe-conjecture") return cmd_probe_conjecture(cfg);
  if (c == "selftest") return cmd_selftest(cfg);
  fail(ErrorKind::usage, "unknown command '" + c + "'");
}

}  // namespace cknlab::report
