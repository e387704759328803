// One line per acceptance criterion; exit status is the number of failures.

#include <cstdio>

#include "cknlab/acceptance.hpp"

int main() {
  int failed = 0;
  for (int id = 1; id <= cknlab::acceptance::kCriterionCount; ++id) {
    const auto r = cknlab::acceptance::run_criterion(id);
    std::printf("%s\n", cknlab::acceptance::format_line(r).c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  std::printf("%d/%d criteria passed\n", cknlab::acceptance::kCriterionCount - failed,
              cknlab::acceptance::kCriterionCount);
  return failed;
}
