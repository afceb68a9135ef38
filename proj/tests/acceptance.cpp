// Acceptance battery: runs every shipped criterion at its pinned tolerance
// and prints one pass/fail line per criterion.

#include <cstdio>

#include "crosslab/suite.hpp"

int main() {
  const crosslab::SuiteReport report = crosslab::run_suite(7, 0);
  std::fputs(crosslab::format_suite_table(report).c_str(), stdout);
  return report.all_pass ? 0 : 1;
}
