#pragma once

// Acceptance criteria with pinned tolerances and runtime budgets. Each check
// is self-contained and deterministic (fixed seeds).

#include <string>
#include <vector>

namespace cknlab::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;   // first failure, or a summary
  double seconds = 0.0;
  double budget = 0.0;  // seconds; exceeding it fails the criterion
};

constexpr int kCriterionCount = 10;

CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_all();

/// "PASS  3 test-function quotient  (0.021 s / 1 s)  detail"
std::string format_line(const CriterionResult& c);

}  // namespace cknlab::acceptance
