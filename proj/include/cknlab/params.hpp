#pragma once

#include <optional>
#include <string>

namespace cknlab {

/// Dimension and weight exponents of one weighted second-order inequality
///   ∫|Δu|²|x|^{-2α} · ∫|∇u|²|x|^{-2β} ≥ C (∫|∇u|²|x|^{-α-β-1})².
/// beta is only consulted by the reference formulas and the radial k=0
/// energies; the main family has β = 0.
struct InequalityParams {
  int N = 2;
  double alpha = 0.0;
  std::optional<double> beta;

  double beta_or_zero() const { return beta.value_or(0.0); }

  /// Throws a domain error unless N >= 1.
  void validate() const;

  /// N >= 2, alpha > -1 and N >= 5 alpha + 5.
  bool weighted_case_holds() const;

  std::string describe() const;

  friend bool operator==(const InequalityParams&, const InequalityParams&) = default;
};

}  // namespace cknlab
