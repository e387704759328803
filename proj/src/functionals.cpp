#include "cknlab/functionals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "cknlab/constants.hpp"
#include "cknlab/error.hpp"
#include "cknlab/special.hpp"

namespace cknlab::functionals {

using quadrature::DecayHint;
using quadrature::IntegrandHandle;
using quadrature::QuadratureSpec;

long laplace_beltrami_eigenvalue(int N, int k) {
  if (N < 2) fail(ErrorKind::domain, "spherical harmonics need N >= 2");
  if (k < 0) fail(ErrorKind::domain, "harmonic degree k must be >= 0");
  return static_cast<long>(k) * (N + k - 2);
}

const char* to_string(FamilyId id) {
  switch (id) {
    case FamilyId::thmA: return "thmA";
    case FamilyId::thm12_1a: return "thm1.2-1a";
    case FamilyId::thm12_1b: return "thm1.2-1b";
    case FamilyId::thm12_2: return "thm1.2-2";
    case FamilyId::thmB: return "thmB";
    case FamilyId::thmC_1: return "thmC-1";
    case FamilyId::thmC_2: return "thmC-2";
    case FamilyId::thmD: return "thmD";
  }
  return "?";
}

FamilyId parse_family(const std::string& s) {
  for (FamilyId id : {FamilyId::thmA, FamilyId::thm12_1a, FamilyId::thm12_1b, FamilyId::thm12_2,
                      FamilyId::thmB, FamilyId::thmC_1, FamilyId::thmC_2, FamilyId::thmD}) {
    if (s == to_string(id)) return id;
  }
  fail(ErrorKind::usage, "unknown profile family '" + s + "'");
}

const char* to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::closed_form_family: return "closed-form-family";
    case ProfileKind::basis_coefficients: return "basis-coefficients";
    case ProfileKind::callable: return "callable";
  }
  return "?";
}

void ExtremalFamily::validate() const {
  params.validate();
  if (!std::isfinite(a) || !std::isfinite(b)) fail(ErrorKind::domain, "family parameters must be finite");
  const std::string name = to_string(id);
  if (id == FamilyId::thmC_2) {
    if (!(b < 0.0)) fail(ErrorKind::domain, name + " needs b < 0");
  } else if (!(b > 0.0)) {
    fail(ErrorKind::domain, name + " needs b > 0");
  }
  switch (id) {
    case FamilyId::thm12_1a:
    case FamilyId::thm12_1b:
    case FamilyId::thm12_2:
    case FamilyId::thmD:
      if (!(params.alpha > -1.0)) fail(ErrorKind::domain, name + " needs alpha > -1");
      break;
    case FamilyId::thmC_1:
      if (!(params.beta_or_zero() < 1.0)) fail(ErrorKind::domain, name + " needs beta < 1");
      break;
    case FamilyId::thmC_2:
      if (!(params.beta_or_zero() > 1.0)) fail(ErrorKind::domain, name + " needs beta > 1");
      if (params.N < 3) fail(ErrorKind::domain, name + " needs N >= 3 for v to vanish at infinity");
      break;
    case FamilyId::thmA:
    case FamilyId::thmB:
      break;
  }
}

void BasisSpec::validate() const {
  if (m < 1) fail(ErrorKind::domain, "basis size m must be >= 1");
  if (!(decay_q > 0.0) || !std::isfinite(decay_q)) fail(ErrorKind::domain, "basis decay exponent must be positive");
  if (!std::isfinite(gamma0)) fail(ErrorKind::domain, "basis offset gamma0 must be finite");
}

BasisSpec BasisSpec::for_alpha(double alpha, int m) {
  return BasisSpec{m, 2.0 * alpha + 1.0, alpha + 1.0};
}

// ---------------------------------------------------------------------------

struct RadialProfile::State {
  ProfileKind kind = ProfileKind::callable;
  std::optional<ExtremalFamily> family;
  std::optional<std::vector<double>> coeffs;
  std::optional<ExpPolySeries> v, dv, d2v;
  Callable callable;
  std::array<std::function<double(double)>, 3> parts;  // v, v', v'' separately
  std::optional<DecayHint> hint;
  bool v_from_derivative = false;
};

namespace {

// -∫_r^∞ v'(ρ) dρ for a series derivative, returned with exp(b r^q) taken out.
double tail_cofactor(const ExpPolySeries& dv, double r) {
  const double sr = dv.rate() * std::pow(r, dv.decay_q());
  IntegrandHandle h;
  h.evaluator = [&dv, sr](double rho) {
    return dv.cofactor(rho, 0.0) * std::exp(sr - dv.rate() * std::pow(rho, dv.decay_q()));
  };
  h.decay_hint = DecayHint{dv.rate(), dv.decay_q()};
  return -quadrature::integrate_from(h, r).value;
}

double tail_value(const std::function<double(double)>& dv, double r) {
  IntegrandHandle h;
  h.evaluator = dv;
  return -quadrature::integrate_from(h, r).value;
}

std::shared_ptr<RadialProfile::State> series_state(const ExpPolySeries& v) {
  auto s = std::make_shared<RadialProfile::State>();
  s->v = v;
  s->dv = v.derivative();
  s->d2v = s->dv->derivative();
  s->hint = DecayHint{v.rate(), v.decay_q()};
  return s;
}

std::shared_ptr<RadialProfile::State> derivative_state(const ExpPolySeries& dv) {
  auto s = std::make_shared<RadialProfile::State>();
  s->dv = dv;
  s->d2v = dv.derivative();
  s->v = dv.antiderivative_from_infinity();
  s->v_from_derivative = !s->v.has_value();
  s->hint = DecayHint{dv.rate(), dv.decay_q()};
  return s;
}

void check_against_differences(const RadialProfile::Callable& f) {
  for (int i = 1; i <= 16; ++i) {
    const double r = 0.25 * i;
    const double h = 1e-3 * r;
    const ProfileValues c = f(r);
    const ProfileValues m2 = f(r - 2 * h), m1 = f(r - h), p1 = f(r + h), p2 = f(r + 2 * h);
    auto diff = [h](double a, double b, double d, double e) { return (a - 8 * b + 8 * d - e) / (12 * h); };
    const std::array<std::array<double, 2>, 2> pairs = {
        {{c.dv, diff(m2.v, m1.v, p1.v, p2.v)}, {c.d2v, diff(m2.dv, m1.dv, p1.dv, p2.dv)}}};
    for (const auto& [exact, fd] : pairs) {
      if (!std::isfinite(exact) || !std::isfinite(fd)) {
        fail(ErrorKind::non_finite_sample, "profile is not finite at r=" + std::to_string(r));
      }
      const double scale = std::max({std::abs(exact), std::abs(fd), 1e-12 * std::abs(c.v)});
      if (std::abs(exact - fd) > 1e-6 * scale && scale > 0.0) {
        std::ostringstream os;
        os << std::setprecision(12) << "profile derivative inconsistent with finite differences at r=" << r << ": supplied "
           << exact << ", difference quotient " << fd;
        fail(ErrorKind::domain, os.str());
      }
    }
  }
}

}  // namespace

RadialProfile RadialProfile::from_family(const ExtremalFamily& fam) {
  fam.validate();
  const double a = fam.a;
  const double b = fam.b;
  const double alpha = fam.params.alpha;
  std::shared_ptr<State> s;
  switch (fam.id) {
    case FamilyId::thmA:
      s = series_state(ExpPolySeries(b, 1.0, {{a, 0.0}, {a * b, 1.0}}));
      break;
    case FamilyId::thm12_1b:
    case FamilyId::thm12_2: {
      const double q = alpha + 1.0;
      s = series_state(ExpPolySeries(b, q, {{a, 0.0}, {a * b, q}}));
      break;
    }
    case FamilyId::thm12_1a:
      s = derivative_state(ExpPolySeries(b, alpha + 1.0, {{-a, 0.0}}));
      break;
    case FamilyId::thmB:
      s = series_state(ExpPolySeries(b, 2.0, {{a, 0.0}}));
      break;
    case FamilyId::thmD:
      s = series_state(ExpPolySeries(b, 2.0 * (alpha + 1.0), {{a, 0.0}}));
      break;
    case FamilyId::thmC_1: {
      const double beta = fam.params.beta_or_zero();
      s = derivative_state(ExpPolySeries(b / (1.0 - beta), 1.0 - beta, {{a, 1.0}}));
      break;
    }
    case FamilyId::thmC_2: {
      // v' = a r^{1-N} exp(-c r^{-g}) with c = b/(1-β) > 0, g = β - 1 > 0.
      const double beta = fam.params.beta_or_zero();
      const double c = b / (1.0 - beta);
      const double g = beta - 1.0;
      const double n1 = 1.0 - fam.params.N;
      auto dv = [a, c, g, n1](double r) {
        if (a == 0.0) return 0.0;
        const double l = n1 * std::log(r) - c * std::pow(r, -g);
        return a * std::exp(l);
      };
      auto d2v = [a, c, g, n1](double r) {
        if (a == 0.0) return 0.0;
        const double lr = std::log(r);
        const double e = std::exp((n1 - 1.0) * lr - c * std::pow(r, -g));
        return a * e * (n1 + c * g * std::pow(r, -g));
      };
      s = std::make_shared<State>();
      s->callable = [dv, d2v](double r) {
        return ProfileValues{tail_value(dv, r), dv(r), d2v(r)};
      };
      s->parts = {[dv](double r) { return tail_value(dv, r); }, dv, d2v};
      s->v_from_derivative = true;
      break;
    }
  }
  s->kind = ProfileKind::closed_form_family;
  s->family = fam;
  return RadialProfile(std::move(s));
}

RadialProfile RadialProfile::from_series(const ExpPolySeries& v) {
  auto s = series_state(v);
  s->kind = ProfileKind::basis_coefficients;
  return RadialProfile(std::move(s));
}

RadialProfile RadialProfile::from_basis(const BasisSpec& basis, std::vector<double> coeffs) {
  basis.validate();
  if (static_cast<int>(coeffs.size()) != basis.m) {
    fail(ErrorKind::domain, "coefficient count does not match the basis size");
  }
  std::vector<ExpPolyTerm> terms;
  for (int j = 0; j < basis.m; ++j) terms.push_back({coeffs[j], basis.gamma0 + j * basis.decay_q});
  auto s = derivative_state(ExpPolySeries(1.0, basis.decay_q, std::move(terms)));
  s->kind = ProfileKind::basis_coefficients;
  s->coeffs = std::move(coeffs);
  return RadialProfile(std::move(s));
}

RadialProfile RadialProfile::from_callable(Callable f, std::optional<DecayHint> hint, bool validate) {
  if (!f) fail(ErrorKind::domain, "callable profile needs an evaluator");
  if (validate) check_against_differences(f);
  auto s = std::make_shared<State>();
  s->kind = ProfileKind::callable;
  s->callable = std::move(f);
  s->hint = hint;
  return RadialProfile(std::move(s));
}

ProfileKind RadialProfile::kind() const { return s_->kind; }
const std::optional<ExtremalFamily>& RadialProfile::family() const { return s_->family; }
const std::optional<std::vector<double>>& RadialProfile::coeffs() const { return s_->coeffs; }
std::optional<DecayHint> RadialProfile::decay_hint() const { return s_->hint; }
const std::optional<ExpPolySeries>& RadialProfile::v_series() const { return s_->v; }
const std::optional<ExpPolySeries>& RadialProfile::dv_series() const { return s_->dv; }
const std::optional<ExpPolySeries>& RadialProfile::d2v_series() const { return s_->d2v; }
bool RadialProfile::v_from_derivative() const { return s_->v_from_derivative; }

ProfileValues RadialProfile::operator()(double r) const {
  if (s_->callable) return s_->callable(r);
  ProfileValues out;
  out.dv = (*s_->dv)(r);
  out.d2v = (*s_->d2v)(r);
  if (s_->v) {
    out.v = (*s_->v)(r);
  } else {
    out.v = tail_cofactor(*s_->dv, r) * std::exp(-s_->dv->rate() * std::pow(r, s_->dv->decay_q()));
  }
  return out;
}

double RadialProfile::derivative(int order, double r) const {
  if (order < 0 || order > 2) fail(ErrorKind::domain, "derivative order must be 0, 1 or 2");
  if (s_->parts[order]) return s_->parts[order](r);
  if (!s_->callable) {
    if (order == 1) return (*s_->dv)(r);
    if (order == 2) return (*s_->d2v)(r);
    if (s_->v) return (*s_->v)(r);
  }
  const ProfileValues p = (*this)(r);
  return order == 0 ? p.v : order == 1 ? p.dv : p.d2v;
}

RadialProfile RadialProfile::dilated(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorKind::domain, "dilation factor must be positive");
  std::shared_ptr<State> s;
  if (s_->callable) {
    s = std::make_shared<State>(*s_);
    auto f = s_->callable;
    s->callable = [f, lambda](double r) {
      const ProfileValues p = f(lambda * r);
      return ProfileValues{p.v, lambda * p.dv, lambda * lambda * p.d2v};
    };
    for (int i = 0; i < 3; ++i) {
      if (auto part = s_->parts[i]) {
        const double factor = std::pow(lambda, i);
        s->parts[i] = [part, lambda, factor](double r) { return factor * part(lambda * r); };
      }
    }
    if (s->hint) s->hint->c *= std::pow(lambda, s->hint->q);
  } else if (s_->v && !s_->v_from_derivative && s_->v->rate() == s_->dv->rate() &&
             s_->kind != ProfileKind::basis_coefficients) {
    s = series_state(s_->v->dilated(lambda));
  } else {
    s = derivative_state(s_->dv->dilated(lambda).scaled(lambda));
  }
  s->kind = s_->kind;
  return RadialProfile(std::move(s));
}

RadialProfile RadialProfile::scaled(double c) const {
  if (!std::isfinite(c)) fail(ErrorKind::domain, "amplitude must be finite");
  std::shared_ptr<State> s;
  if (s_->callable) {
    s = std::make_shared<State>(*s_);
    auto f = s_->callable;
    s->callable = [f, c](double r) {
      const ProfileValues p = f(r);
      return ProfileValues{c * p.v, c * p.dv, c * p.d2v};
    };
    for (auto& part : s->parts) {
      if (part) part = [inner = part, c](double r) { return c * inner(r); };
    }
  } else {
    s = std::make_shared<State>(*s_);
    if (s->v) s->v = s->v->scaled(c);
    s->dv = s->dv->scaled(c);
    s->d2v = s->d2v->scaled(c);
  }
  s->kind = s_->kind;
  return RadialProfile(std::move(s));
}

RadialProfile extremal_profile(const ExtremalFamily& fam) { return RadialProfile::from_family(fam); }

// ---------------------------------------------------------------------------

namespace {

enum class Field { v, dv, d2v };

const char* field_name(Field f) {
  switch (f) {
    case Field::v: return "v";
    case Field::dv: return "v'";
    case Field::d2v: return "v''";
  }
  return "?";
}

struct Term {
  Field field;
  double weight;
  double coef;
};

struct TermValue {
  std::optional<LogValue> closed;
  std::optional<LogValue> quad;
  double rel_err = 0.0;
};

const std::optional<ExpPolySeries>& series_for(const RadialProfile& p, Field f) {
  switch (f) {
    case Field::v: return p.v_series();
    case Field::dv: return p.dv_series();
    case Field::d2v: return p.d2v_series();
  }
  return p.v_series();
}

std::string divergence_message(Field f, double w, double p) {
  std::ostringstream os;
  os << "integral of " << field_name(f) << "^2 r^" << w << " diverges at r=0 (effective exponent "
     << p << " <= -1)";
  return os.str();
}

LogValue from_quadrature(const quadrature::QuadratureResult& r, double log_scale, double* rel_err) {
  LogValue out = LogValue::from(r.value);
  if (out.sign != 0) {
    out.log_abs += log_scale;
    *rel_err = r.err_est / std::abs(r.value);
  }
  return out;
}

// Quadrature of ∫ r^w (field)² dr.
LogValue quadrature_term(const RadialProfile& prof, const Term& t, const QuadratureSpec& spec,
                         double* rel_err) {
  const auto& series = series_for(prof, t.field);
  if (series) {
    const ExpPolySeries& s = *series;
    if (s.empty()) return {};
    const double e0 = s.min_exponent();
    const double p = t.weight + 2.0 * e0;
    if (!(p > -1.0)) fail(ErrorKind::divergence, divergence_message(t.field, t.weight, p));
    double cmax = 0.0;
    for (const auto& term : s.terms()) cmax = std::max(cmax, std::abs(term.coef));
    IntegrandHandle h;
    h.weight_exponent = p;
    h.decay_hint = DecayHint{2.0 * s.rate(), s.decay_q()};
    h.decay_factored = true;
    h.log_scale = special::log_weighted_exp_integral({p, 2.0 * s.rate(), s.decay_q()}) +
                  2.0 * std::log(cmax);
    h.evaluator = [&s, e0](double r) {
      const double c = s.cofactor(r, e0);
      return c * c;
    };
    return from_quadrature(quadrature::integrate(h, spec), h.log_scale, rel_err);
  }
  if (t.field == Field::v && prof.dv_series() && prof.v_from_derivative()) {
    // v only known through v'; rebuild it by tail quadrature at every node.
    const ExpPolySeries& dv = *prof.dv_series();
    if (!(t.weight > -1.0)) fail(ErrorKind::divergence, divergence_message(t.field, t.weight, t.weight));
    IntegrandHandle h;
    h.weight_exponent = t.weight;
    h.decay_hint = DecayHint{2.0 * dv.rate(), dv.decay_q()};
    h.decay_factored = true;
    h.evaluator = [&dv](double r) {
      const double c = tail_cofactor(dv, r);
      return c * c;
    };
    return from_quadrature(quadrature::integrate(h, spec), 0.0, rel_err);
  }
  IntegrandHandle h;
  const double w = t.weight;
  const Field field = t.field;
  if (auto hint = prof.decay_hint()) h.decay_hint = DecayHint{2.0 * hint->c, hint->q};
  if (w > -1.0) {
    h.weight_exponent = w;
    h.evaluator = [&prof, field](double r) {
      const double x = prof.derivative(static_cast<int>(field), r);
      return x * x;
    };
  } else {
    h.weight_exponent = 0.0;
    h.evaluator = [&prof, field, w](double r) {
      const double x = prof.derivative(static_cast<int>(field), r);
      if (x == 0.0) return 0.0;
      return std::exp(w * std::log(r) + 2.0 * std::log(std::abs(x)));
    };
  }
  return from_quadrature(quadrature::integrate(h, spec), 0.0, rel_err);
}

LogValue closed_term(const RadialProfile& prof, const Term& t) {
  const ExpPolySeries& s = *series_for(prof, t.field);
  if (s.empty()) return {};
  const double p = t.weight + 2.0 * s.min_exponent();
  if (!(p > -1.0)) fail(ErrorKind::divergence, divergence_message(t.field, t.weight, p));
  return weighted_product_integral(s, s, t.weight);
}

double relative_gap(const LogValue& a, const LogValue& b) {
  if (a.sign == 0 && b.sign == 0) return 0.0;
  if (a.sign != b.sign) return std::numeric_limits<double>::infinity();
  return std::abs(std::expm1(a.log_abs - b.log_abs));
}

}  // namespace

ModeEnergy mode_energies(const RadialProfile& v, const InequalityParams& params, int k,
                         const EnergyOptions& opts) {
  params.validate();
  opts.spec.validate();
  if (k < 0) fail(ErrorKind::domain, "mode index k must be >= 0");
  if (params.N < 2 && k != 0) fail(ErrorKind::domain, "N = 1 has only the k = 0 mode");
  const double beta = params.beta_or_zero();
  if (beta != 0.0 && k != 0) fail(ErrorKind::domain, "beta != 0 is only supported for k = 0");

  const double N = params.N;
  const double a = params.alpha;
  const double n2k = N + 2.0 * k;

  // Terms grouped as A, B, C.
  std::array<std::vector<Term>, 3> groups;
  groups[0].push_back({Field::d2v, n2k - 2 * a - 1, 1.0});
  const double a2 = (2 * a + 1) * (n2k - 1);
  if (a2 != 0.0) groups[0].push_back({Field::dv, n2k - 2 * a - 3, a2});
  groups[1].push_back({Field::dv, n2k - 1 - 2 * beta, 1.0});
  groups[2].push_back({Field::dv, n2k - a - beta - 2, 1.0});
  if (k > 0) groups[2].push_back({Field::v, n2k - a - 4, (a + 1) * k});

  const bool want_closed = opts.route != EnergyRoute::quadrature_only;
  const bool want_quad = opts.route != EnergyRoute::closed_form_only;

  ModeEnergy e;
  e.k = k;
  e.params = params;
  e.closed_form = want_closed;
  e.quadrature = want_quad;
  std::array<LogValue, 3> totals;
  std::array<double, 2> c_parts{0.0, 0.0};
  for (std::size_t g = 0; g < 3; ++g) {
    LogValue closed_sum, quad_sum;
    bool closed_complete = true;
    for (std::size_t i = 0; i < groups[g].size(); ++i) {
      const Term& t = groups[g][i];
      std::optional<LogValue> closed, quad;
      if (want_closed && series_for(v, t.field)) {
        closed = closed_term(v, t);
      } else {
        closed_complete = false;
        if (!want_quad) {
          fail(ErrorKind::domain, std::string("no closed form for the ") + field_name(t.field) +
                                      " energy of this profile");
        }
      }
      if (want_quad) {
        double rel = 0.0;
        quad = quadrature_term(v, t, opts.spec, &rel);
        e.err_est = std::max(e.err_est, rel);
      }
      const LogValue best = closed ? *closed : *quad;
      if (g == 2) c_parts[i] = best.value();
      closed_sum = closed_sum + (closed ? *closed : best) * t.coef;
      if (quad) quad_sum = quad_sum + *quad * t.coef;
    }
    if (want_closed && want_quad && closed_complete) {
      const double gap = relative_gap(closed_sum, quad_sum);
      e.route_discrepancy = std::max(e.route_discrepancy, gap);
      if (gap > opts.agreement_tol) {
        std::ostringstream os;
        os << "closed form and quadrature disagree for energy " << "ABC"[g] << " (relative gap "
           << gap << ", tolerance " << opts.agreement_tol << ")";
        fail(ErrorKind::consistency, os.str());
      }
    }
    totals[g] = closed_sum;
  }
  e.closed_form = want_closed;
  e.log_A = totals[0];
  e.log_B = totals[1];
  e.log_C = totals[2];
  e.A = e.log_A.value();
  e.B = e.log_B.value();
  e.C = e.log_C.value();
  e.cross_gradient = c_parts[0];
  e.hardy_integral = c_parts[1];
  return e;
}

double quotient(const ModeEnergy& e) {
  if (e.log_C.sign <= 0) {
    fail(ErrorKind::zero_denominator, "cross energy C vanishes; the quotient is undefined");
  }
  if (e.log_A.sign == 0 || e.log_B.sign == 0) return 0.0;
  const double l = e.log_A.log_abs + e.log_B.log_abs - 2.0 * e.log_C.log_abs;
  const double q = std::exp(l) * e.log_A.sign * e.log_B.sign;
  if (!std::isfinite(q)) fail(ErrorKind::overflow, "quotient overflows double");
  return q;
}

double mode_quotient(const RadialProfile& v, const InequalityParams& params, int k,
                     const EnergyOptions& opts) {
  return quotient(mode_energies(v, params, k, opts));
}

double one_dim_quotient(const RadialProfile& v, double alpha, const EnergyOptions& opts) {
  if (!(alpha > -1.0)) fail(ErrorKind::domain, "one-dimensional quotient needs alpha > -1");
  // Doubling over the two half-lines cancels in A·B/C².
  return mode_quotient(v, InequalityParams{1, alpha, std::nullopt}, 0, opts);
}

double test_function_quotient(int N, const QuadratureSpec& spec) {
  const double closed = constants::to_double(constants::exact_test_function_value(N));
  const RadialProfile v = RadialProfile::from_callable(
      [](double r) {
        const double e = std::exp(-r);
        return ProfileValues{e, -e, e};
      },
      DecayHint{1.0, 1.0}, false);
  EnergyOptions opts;
  opts.spec = spec;
  opts.route = EnergyRoute::quadrature_only;
  const double quad = mode_quotient(v, InequalityParams{N, 0.0, std::nullopt}, 1, opts);
  const double gap = std::abs(quad / closed - 1.0);
  if (gap > 1e-10) {
    std::ostringstream os;
    os << "test-function quotient: quadrature " << quad << " vs closed form " << closed
       << " (relative gap " << gap << ")";
    fail(ErrorKind::consistency, os.str());
  }
  return closed;
}

}  // namespace cknlab::functionals
