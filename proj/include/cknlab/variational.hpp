#pragma once

// Minimization of the per-mode product quotient
//   Q(c) = (cᵀ M_A c)(cᵀ M_B c) / (cᵀ M_C c)²
// over the span of φ_j(r) = r^{γ₀ + j q} e^{-r^q}, taken as w = v'.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cknlab/functionals.hpp"
#include "cknlab/params.hpp"

namespace cknlab::variational {

using functionals::BasisSpec;

enum class GramForm {
  hardy_free,  // C = ∫w² r^{N+2k-α-2} only (the D̂ quotient)
  full,        // C also carries (α+1)k ∫v² r^{N+2k-α-4}, v = -∫_r^∞ w
};
const char* to_string(GramForm f);

struct GramTriple {
  Eigen::MatrixXd A, B, C;
  /// Coefficients in this triple's coordinates map to basis coefficients
  /// through c = to_monomial * y (identity for the plain route).
  Eigen::MatrixXd to_monomial;
  GramForm form = GramForm::hardy_free;
  BasisSpec basis;
  InequalityParams params;
  int k = 0;
  bool conditioned = false;  // C is the identity
  bool a_indefinite = false;
  int verified_entries = 0;  // entries spot-checked against quadrature
};

struct GramOptions {
  GramForm form = GramForm::hardy_free;
  double verify_fraction = 0.1;  // share of entries checked by quadrature
  double verify_tol = 1e-10;     // relative to sqrt(M_jj M_ll)
  std::uint64_t seed = 42;
};

/// Gram matrices of A, B, C over the basis, every entry a sum of Gamma
/// closed forms evaluated in double precision.
GramTriple build_gram(const InequalityParams& params, int k, const BasisSpec& basis,
                      const GramOptions& opts = {});

/// Same forms assembled in 50-digit arithmetic and orthonormalized against
/// C before rounding, so that C is the identity. The first j basis vectors do
/// not depend on m, which makes zero-padding a valid warm start.
GramTriple build_conditioned_gram(const InequalityParams& params, int k, const BasisSpec& basis,
                                  const GramOptions& opts = {});

struct LogQuotient {
  double value = 0.0;  // log Q
  Eigen::VectorXd gradient;
};
/// log Q and its gradient with respect to the triple's coordinates.
LogQuotient log_quotient(const GramTriple& g, const Eigen::VectorXd& y);

struct MinimizeOptions {
  int restarts = 8;
  double tol = 1e-10;
  int max_iter = 2000;
  std::uint64_t seed = 42;
  std::optional<Eigen::VectorXd> warm_start;  // in the triple's coordinates
};

struct MinimizationResult {
  double value = 0.0;
  Eigen::VectorXd y;       // minimizer in the triple's coordinates
  Eigen::VectorXd coeffs;  // basis coefficients
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  int basis_size = 0;
  std::vector<std::string> warnings;
};

/// Best local minimum of Q over restarts (e_0, the warm start and seeded
/// random starts), by quasi-Newton steps on log Q with renormalization to the
/// C-unit sphere. Never throws on non-convergence; see `converged`.
MinimizationResult minimize_quotient(const GramTriple& g, const MinimizeOptions& opts = {});

struct EstimateOptions {
  GramForm form = GramForm::full;
  std::optional<double> gamma0;  // default 2α+1
  MinimizeOptions minimize;
};

struct TracePoint {
  int m = 0;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

struct Estimate {
  MinimizationResult result;
  std::vector<TracePoint> trace;
  bool trace_monotone = true;  // non-increasing within 1e-10
};

/// Per-mode constant estimate over nested bases of strictly increasing size.
Estimate estimate_mode_constant(const InequalityParams& params, int k,
                                const std::vector<int>& basis_sizes,
                                const EstimateOptions& opts = {});

struct ScanRow {
  int k = 0;
  double raw = 0.0;           // D̂ estimate (C without the v² term)
  double hardy_factor = 1.0;  // 1 + 4(α+1)k/(N+2k-α-3)²
  double effective = 0.0;     // raw / factor²
  double full = 0.0;          // full per-mode quotient estimate
  std::optional<double> formula;  // K(N,α,k) when α > -1
  bool converged = false;
  std::vector<TracePoint> trace;
};

struct ScanResult {
  InequalityParams params;
  std::vector<ScanRow> rows;
  int argmin_full = 0;
  int argmin_effective = 0;
  bool radial = true;
  std::string verdict;  // "radial" or "symmetry-broken at k=..."
  bool conjecture_open = false;
};

struct ScanOptions {
  std::vector<int> basis_sizes{4, 8, 16};
  int jobs = 1;
  MinimizeOptions minimize;
};

ScanResult symmetry_breaking_scan(int N, double alpha, int k_max, const ScanOptions& opts = {});

struct ProbeResult {
  ScanResult scan;
  double estimate = 0.0;       // min over k of the full per-mode estimates
  double radial_value = 0.0;   // k = 0 row
  double test_profile = 0.0;   // quotient of v = e^{-r} at k = 1
  double lower_bound = 0.0;    // J(4,1)
  std::string lower_bound_exact;
  double radial_bound = 0.0;   // 25/4
  std::string banner;
};

ProbeResult probe_conjecture(int N, const ScanOptions& opts, int k_max);

}  // namespace cknlab::variational
