#pragma once

// Radial profiles, the per-mode energies of u = r^k v(r) φ_k(σ) and the
// product quotient A·B/C². The surface measure of the sphere cancels in every
// quotient and is left out of all stored energies.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cknlab/params.hpp"
#include "cknlab/quadrature.hpp"
#include "cknlab/series.hpp"

namespace cknlab::functionals {

/// Eigenvalue k(N+k-2) of -Δ on the sphere S^{N-1} for degree-k harmonics.
long laplace_beltrami_eigenvalue(int N, int k);

enum class FamilyId { thmA, thm12_1a, thm12_1b, thm12_2, thmB, thmC_1, thmC_2, thmD };
const char* to_string(FamilyId id);
FamilyId parse_family(const std::string& s);  // "thmA", "thm1.2-1a", ...

/// Members of the closed-form extremal families
///   thmA        a(1 + b r) e^{-b r}
///   thm1.2-1a   v' = -a e^{-b r^{α+1}}
///   thm1.2-1b   a(1 + b r^{α+1}) e^{-b r^{α+1}}   (also thm1.2-2)
///   thmB        a e^{-b r²}
///   thmC-1      v' = a r e^{-b r^{1-β}/(1-β)}         β < 1, b > 0
///   thmC-2      v' = a r^{1-N} e^{-b r^{1-β}/(1-β)}   β > 1, b < 0
///   thmD        a e^{-b r^{2(α+1)}}
struct ExtremalFamily {
  FamilyId id = FamilyId::thm12_2;
  double a = 1.0;
  double b = 1.0;
  InequalityParams params;

  void validate() const;
};

struct ProfileValues {
  double v = 0.0;
  double dv = 0.0;
  double d2v = 0.0;
};

enum class ProfileKind { closed_form_family, basis_coefficients, callable };
const char* to_string(ProfileKind kind);

/// Exponential-polynomial basis φ_j(r) = r^{γ₀ + j q} e^{-r^q} for w = v'.
struct BasisSpec {
  int m = 8;
  double gamma0 = 1.0;
  double decay_q = 1.0;

  /// m >= 1, q > 0 (divergence checks happen where the weights are known).
  void validate() const;
  /// Basis matching the radial extremal: γ₀ = 2α+1, q = α+1.
  static BasisSpec for_alpha(double alpha, int m);
};

/// Immutable radial function with its first two derivatives. Copies share
/// state and may be used from several threads.
class RadialProfile {
 public:
  using Callable = std::function<ProfileValues(double)>;

  /// Closed-form family member (the extremal_profile operation).
  static RadialProfile from_family(const ExtremalFamily& fam);
  /// v given as an exponential-polynomial series.
  static RadialProfile from_series(const ExpPolySeries& v);
  /// v' = Σ c_j φ_j over the given basis, v(∞) = 0.
  static RadialProfile from_basis(const BasisSpec& basis, std::vector<double> coeffs);
  /// User-supplied v, v', v''. The derivatives are checked against central
  /// differences on a sample grid (relative 1e-6) unless validate is false.
  static RadialProfile from_callable(Callable f, std::optional<quadrature::DecayHint> hint = {},
                                     bool validate = true);

  ProfileKind kind() const;
  const std::optional<ExtremalFamily>& family() const;
  const std::optional<std::vector<double>>& coeffs() const;
  std::optional<quadrature::DecayHint> decay_hint() const;

  ProfileValues operator()(double r) const;
  /// One of v (order 0), v' (1), v'' (2) at r.
  double derivative(int order, double r) const;

  /// Closed-form series of v, v', v'' where available.
  const std::optional<ExpPolySeries>& v_series() const;
  const std::optional<ExpPolySeries>& dv_series() const;
  const std::optional<ExpPolySeries>& d2v_series() const;

  /// Whether v is only known through v' and is rebuilt by tail quadrature.
  bool v_from_derivative() const;

  RadialProfile dilated(double lambda) const;  // r -> v(lambda r)
  RadialProfile scaled(double c) const;        // c v

  struct State;

 private:
  explicit RadialProfile(std::shared_ptr<const State> s) : s_(std::move(s)) {}
  std::shared_ptr<const State> s_;
};

RadialProfile extremal_profile(const ExtremalFamily& fam);

enum class EnergyRoute {
  automatic,        // closed form and quadrature, cross-checked
  quadrature_only,  // never touches the series closed forms
  closed_form_only,
};

struct EnergyOptions {
  quadrature::QuadratureSpec spec;
  EnergyRoute route = EnergyRoute::automatic;
  double agreement_tol = 1e-9;
};

/// Energies of one mode, each also kept as a logarithm so that parameter
/// ranges whose integrals leave the double range still give finite quotients.
struct ModeEnergy {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  LogValue log_A, log_B, log_C;
  double cross_gradient = 0.0;  // ∫ v'² r^{N+2k-α-β-2}
  double hardy_integral = 0.0;  // ∫ v² r^{N+2k-α-4}  (0 for k = 0)
  int k = 0;
  InequalityParams params;
  bool closed_form = false;
  bool quadrature = false;
  double route_discrepancy = 0.0;  // max relative difference between routes
  double err_est = 0.0;            // largest relative quadrature error estimate
};

/// Energies
///   A = ∫v''² r^{N+2k-2α-1} + (2α+1)(N+2k-1) ∫v'² r^{N+2k-2α-3}
///   B = ∫v'² r^{N+2k-1-2β}
///   C = ∫v'² r^{N+2k-α-β-2} + (α+1)k ∫v² r^{N+2k-α-4}
/// β is only accepted for k = 0 (radial reference checks).
ModeEnergy mode_energies(const RadialProfile& v, const InequalityParams& params, int k,
                         const EnergyOptions& opts = {});

double quotient(const ModeEnergy& e);

/// A·B/C² for the profile.
double mode_quotient(const RadialProfile& v, const InequalityParams& params, int k,
                     const EnergyOptions& opts = {});

/// ∫|u''|²|x|^{-2α} ∫|u'|² / (∫|u'|²|x|^{-α-1})² for even u on ℝ.
double one_dim_quotient(const RadialProfile& v, double alpha, const EnergyOptions& opts = {});

/// Quotient of |x| e^{-|x|} φ₁ in dimension N, by quadrature, after checking
/// it against N(N+4)(N²-1)²/(4(N²-N+4)²) within relative 1e-10.
double test_function_quotient(int N, const quadrature::QuadratureSpec& spec = {});

}  // namespace cknlab::functionals
