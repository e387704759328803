#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "cknlab/error.hpp"
#include "cknlab/quadrature.hpp"
#include "cknlab/special.hpp"
#include "cknlab/variational.hpp"

namespace cknlab::variational {

const char* to_string(GramForm f) {
  return f == GramForm::full ? "full" : "hardy-free";
}

namespace {

using Mp = boost::multiprecision::cpp_bin_float_50;
using MpMatrix = std::vector<std::vector<Mp>>;

// The weights of the quadratic forms for w = v'.
struct Weights {
  double a1, a2, b, c, h;  // exponents
  double a2_coef, h_coef;  // (2α+1)(N+2k-1), (α+1)k
};

Weights weights_for(const InequalityParams& p, int k) {
  const double N = p.N;
  const double a = p.alpha;
  const double n2k = N + 2.0 * k;
  return Weights{n2k - 2 * a - 1, n2k - 2 * a - 3, n2k - 1, n2k - a - 2, n2k - a - 4,
                 (2 * a + 1) * (n2k - 1), (a + 1) * k};
}

void check_inputs(const InequalityParams& params, int k, const BasisSpec& basis, GramForm form) {
  params.validate();
  basis.validate();
  if (params.N < 2) fail(ErrorKind::domain, "per-mode Gram matrices need N >= 2");
  if (k < 0) fail(ErrorKind::domain, "mode index k must be >= 0");
  if (params.beta && *params.beta != 0.0) fail(ErrorKind::domain, "Gram matrices are built for beta = 0");
  if (form == GramForm::full && k > 0) {
    const double n0 = (basis.gamma0 + 1.0) / basis.decay_q;
    if (std::abs(n0 - std::round(n0)) > 1e-12 || std::round(n0) < 1.0) {
      std::ostringstream os;
      os << "the full quotient needs (gamma0 + 1)/q to be a positive integer so that v = -∫w is "
            "a finite series; got (" << basis.gamma0 << " + 1)/" << basis.decay_q << " = " << n0;
      fail(ErrorKind::domain, os.str());
    }
  }
}

std::string entry_label(const char* name, int j, int l, double w) {
  std::ostringstream os;
  os << "Gram entry (" << j << ", " << l << ") of " << name << " with weight r^" << w;
  return os.str();
}

// ---- double route ---------------------------------------------------------

struct SeriesBasis {
  std::vector<ExpPolySeries> w, dw, v;
};

SeriesBasis series_basis(const BasisSpec& basis, bool need_v) {
  SeriesBasis s;
  for (int j = 0; j < basis.m; ++j) {
    ExpPolySeries phi(1.0, basis.decay_q, {{1.0, basis.gamma0 + j * basis.decay_q}});
    s.dw.push_back(phi.derivative());
    if (need_v) s.v.push_back(*phi.antiderivative_from_infinity());
    s.w.push_back(std::move(phi));
  }
  return s;
}

Eigen::MatrixXd series_gram(const std::vector<ExpPolySeries>& f, double w, const char* name) {
  const int m = static_cast<int>(f.size());
  Eigen::MatrixXd M(m, m);
  for (int j = 0; j < m; ++j) {
    for (int l = j; l < m; ++l) {
      try {
        M(j, l) = weighted_product_integral(f[j], f[l], w).value();
      } catch (const Error& e) {
        fail(e.kind(), entry_label(name, j, l, w) + ": " + e.what());
      }
      M(l, j) = M(j, l);
    }
  }
  return M;
}

double quadrature_entry(const ExpPolySeries& f, const ExpPolySeries& g, double w) {
  const double ef = f.min_exponent();
  const double eg = g.min_exponent();
  quadrature::IntegrandHandle h;
  h.weight_exponent = w + ef + eg;
  h.decay_hint = quadrature::DecayHint{f.rate() + g.rate(), f.decay_q()};
  h.decay_factored = true;
  h.evaluator = [&f, &g, ef, eg](double r) { return f.cofactor(r, ef) * g.cofactor(r, eg); };
  return quadrature::integrate(h).value;
}

int spot_check(const std::vector<ExpPolySeries>& f, const Eigen::MatrixXd& M, double w,
               const char* name, const GramOptions& opts, std::mt19937_64& rng) {
  const int m = static_cast<int>(f.size());
  const int pairs = m * (m + 1) / 2;
  const int count = std::max(1, static_cast<int>(std::ceil(opts.verify_fraction * pairs)));
  if (opts.verify_fraction <= 0.0) return 0;
  std::uniform_int_distribution<int> pick(0, m - 1);
  for (int n = 0; n < count; ++n) {
    int j = pick(rng);
    int l = pick(rng);
    if (j > l) std::swap(j, l);
    const double q = quadrature_entry(f[j], f[l], w);
    const double scale = std::sqrt(std::abs(M(j, j) * M(l, l)));
    if (std::abs(q - M(j, l)) > opts.verify_tol * scale) {
      std::ostringstream os;
      os << entry_label(name, j, l, w) << ": closed form " << M(j, l) << " vs quadrature " << q;
      fail(ErrorKind::consistency, os.str());
    }
  }
  return count;
}

bool indefinite(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, C, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  return es.eigenvalues().minCoeff() < 0.0;
}

// ---- 50-digit route -------------------------------------------------------

// coef · r^{g γ₀ + n q + shift}; exponents stay symbolic so that every entry
// sees the same rounding of γ₀ and q.
struct MpTerm {
  Mp coef;
  int g;
  int n;
  int shift;
};
using MpSeries = std::vector<MpTerm>;

class MpGramBuilder {
 public:
  MpGramBuilder(const BasisSpec& basis) : gamma0_(basis.gamma0), q_(basis.decay_q) {}

  Mp exponent(const MpTerm& t) const { return t.g * gamma0_ + t.n * q_ + t.shift; }

  // ∫ r^w f g e^{-2 r^q} dr.
  Mp product(const MpSeries& f, const MpSeries& g, const Mp& w, const char* name, int j, int l,
             double w_double) {
    Mp sum = 0;
    for (const auto& a : f) {
      for (const auto& b : g) {
        const Mp p = w + exponent(a) + exponent(b);
        if (!(p > -1)) {
          fail(ErrorKind::divergence,
               entry_label(name, j, l, w_double) + ": integrand not integrable at r=0");
        }
        sum += a.coef * b.coef * base((p + 1) / q_);
      }
    }
    return sum;
  }

  MpMatrix gram(const std::vector<MpSeries>& f, const Mp& w, const char* name, double w_double) {
    const std::size_t m = f.size();
    MpMatrix M(m, std::vector<Mp>(m));
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t l = j; l < m; ++l) {
        M[j][l] = product(f[j], f[l], w, name, static_cast<int>(j), static_cast<int>(l), w_double);
        M[l][j] = M[j][l];
      }
    }
    return M;
  }

  const Mp& q() const { return q_; }

 private:
  // Γ(x) / (q 2^x), cached by argument.
  const Mp& base(const Mp& x) {
    auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
    const Mp v = boost::math::tgamma(x) / (q_ * pow(Mp(2), x));
    return cache_.emplace(x, v).first->second;
  }

  Mp gamma0_;
  Mp q_;
  std::map<Mp, Mp> cache_;
};

MpMatrix combine(const MpMatrix& X, const MpMatrix& Y, const Mp& c) {
  MpMatrix out = X;
  if (c == 0) return out;
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = 0; j < X.size(); ++j) out[i][j] += c * Y[i][j];
  return out;
}

// Lower Cholesky factor; throws when the matrix is not numerically positive definite.
MpMatrix cholesky(const MpMatrix& M) {
  const std::size_t m = M.size();
  MpMatrix L(m, std::vector<Mp>(m, Mp(0)));
  for (std::size_t j = 0; j < m; ++j) {
    Mp d = M[j][j];
    for (std::size_t p = 0; p < j; ++p) d -= L[j][p] * L[j][p];
    if (!(d > 0)) {
      fail(ErrorKind::consistency,
           "C Gram matrix is not positive definite at column " + std::to_string(j));
    }
    L[j][j] = sqrt(d);
    for (std::size_t i = j + 1; i < m; ++i) {
      Mp s = M[i][j];
      for (std::size_t p = 0; p < j; ++p) s -= L[i][p] * L[j][p];
      L[i][j] = s / L[j][j];
    }
  }
  return L;
}

// L⁻¹ by forward substitution.
MpMatrix lower_inverse(const MpMatrix& L) {
  const std::size_t m = L.size();
  MpMatrix X(m, std::vector<Mp>(m, Mp(0)));
  for (std::size_t c = 0; c < m; ++c) {
    X[c][c] = 1 / L[c][c];
    for (std::size_t i = c + 1; i < m; ++i) {
      Mp s = 0;
      for (std::size_t p = c; p < i; ++p) s += L[i][p] * X[p][c];
      X[i][c] = -s / L[i][i];
    }
  }
  return X;
}

// Li M Liᵀ, rounded to double and symmetrized.
Eigen::MatrixXd congruence(const MpMatrix& Li, const MpMatrix& M) {
  const std::size_t m = M.size();
  MpMatrix T(m, std::vector<Mp>(m, Mp(0)));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Mp s = 0;
      for (std::size_t p = 0; p <= i; ++p) s += Li[i][p] * M[p][j];
      T[i][j] = s;
    }
  Eigen::MatrixXd out(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      Mp s = 0;
      for (std::size_t p = 0; p <= j; ++p) s += T[i][p] * Li[j][p];
      out(i, j) = out(j, i) = s.convert_to<double>();
    }
  return out;
}

}  // namespace

GramTriple build_gram(const InequalityParams& params, int k, const BasisSpec& basis,
                      const GramOptions& opts) {
  check_inputs(params, k, basis, opts.form);
  const Weights w = weights_for(params, k);
  const bool need_v = opts.form == GramForm::full && k > 0;
  const SeriesBasis s = series_basis(basis, need_v);

  const Eigen::MatrixXd A1 = series_gram(s.dw, w.a1, "A");
  const Eigen::MatrixXd A2 = series_gram(s.w, w.a2, "A");
  const Eigen::MatrixXd B = series_gram(s.w, w.b, "B");
  const Eigen::MatrixXd C1 = series_gram(s.w, w.c, "C");

  GramTriple g;
  g.A = A1 + w.a2_coef * A2;
  g.B = B;
  g.C = C1;
  std::mt19937_64 rng(opts.seed);
  g.verified_entries += spot_check(s.dw, A1, w.a1, "A", opts, rng);
  if (w.a2_coef != 0.0) g.verified_entries += spot_check(s.w, A2, w.a2, "A", opts, rng);
  g.verified_entries += spot_check(s.w, B, w.b, "B", opts, rng);
  g.verified_entries += spot_check(s.w, C1, w.c, "C", opts, rng);
  if (need_v) {
    const Eigen::MatrixXd H = series_gram(s.v, w.h, "C (v^2 term)");
    g.verified_entries += spot_check(s.v, H, w.h, "C (v^2 term)", opts, rng);
    g.C += w.h_coef * H;
  }
  g.to_monomial = Eigen::MatrixXd::Identity(basis.m, basis.m);
  g.form = opts.form;
  g.basis = basis;
  g.params = params;
  g.k = k;
  g.conditioned = false;
  g.a_indefinite = indefinite(g.A, g.C);
  return g;
}

GramTriple build_conditioned_gram(const InequalityParams& params, int k, const BasisSpec& basis,
                                  const GramOptions& opts) {
  check_inputs(params, k, basis, opts.form);
  const bool need_v = opts.form == GramForm::full && k > 0;
  MpGramBuilder builder(basis);

  const Mp N = params.N;
  const Mp a = params.alpha;
  const Mp n2k = N + 2 * k;
  const Mp g0 = basis.gamma0;
  const Mp q = basis.decay_q;
  const Weights wd = weights_for(params, k);

  std::vector<MpSeries> W, dW, V;
  const long n0 = need_v ? std::lround((basis.gamma0 + 1.0) / basis.decay_q) : 0;
  for (int j = 0; j < basis.m; ++j) {
    W.push_back({{Mp(1), 1, j, 0}});
    dW.push_back({{g0 + j * q, 1, j, -1}, {-q, 1, j + 1, -1}});
    if (need_v) {
      // -∫_r^∞ ρ^{γ₀+jq} e^{-ρ^q} dρ = -(n-1)!/q e^{-s} Σ_{i<n} s^i/i!,  n = n0 + j.
      const long n = n0 + j;
      MpSeries series;
      Mp f = 1;  // (n-1)!/i!
      for (long i = n - 1; i >= 0; --i) {
        series.push_back({-f / q, 0, static_cast<int>(i), 0});
        f *= i;
      }
      V.push_back(std::move(series));
    }
  }

  const MpMatrix A1 = builder.gram(dW, n2k - 2 * a - 1, "A", wd.a1);
  const Mp a2_coef = (2 * a + 1) * (n2k - 1);
  MpMatrix A = A1;
  if (a2_coef != 0) A = combine(A1, builder.gram(W, n2k - 2 * a - 3, "A", wd.a2), a2_coef);
  const MpMatrix B = builder.gram(W, n2k - 1, "B", wd.b);
  MpMatrix C = builder.gram(W, n2k - a - 2, "C", wd.c);
  if (need_v) C = combine(C, builder.gram(V, n2k - a - 4, "C (v^2 term)", wd.h), (a + 1) * k);

  const MpMatrix L = cholesky(C);
  const MpMatrix Li = lower_inverse(L);

  GramTriple g;
  g.A = congruence(Li, A);
  g.B = congruence(Li, B);
  g.C = Eigen::MatrixXd::Identity(basis.m, basis.m);
  g.to_monomial.resize(basis.m, basis.m);
  for (int i = 0; i < basis.m; ++i)
    for (int j = 0; j < basis.m; ++j) g.to_monomial(i, j) = Li[j][i].convert_to<double>();

  // Spot-check the untransformed entries against quadrature.
  if (opts.verify_fraction > 0.0) {
    const SeriesBasis s = series_basis(basis, false);
    std::mt19937_64 rng(opts.seed);
    Eigen::MatrixXd Bd(basis.m, basis.m), Cd(basis.m, basis.m);
    for (int i = 0; i < basis.m; ++i)
      for (int j = 0; j < basis.m; ++j) {
        Bd(i, j) = B[i][j].convert_to<double>();
        Cd(i, j) = builder.product(W[i], W[j], n2k - a - 2, "C", i, j, wd.c).convert_to<double>();
      }
    g.verified_entries += spot_check(s.w, Bd, wd.b, "B", opts, rng);
    g.verified_entries += spot_check(s.w, Cd, wd.c, "C", opts, rng);
  }

  g.form = opts.form;
  g.basis = basis;
  g.params = params;
  g.k = k;
  g.conditioned = true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.A, Eigen::EigenvaluesOnly);
  g.a_indefinite = es.eigenvalues().minCoeff() < 0.0;
  return g;
}

}  // namespace cknlab::variational
