#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crosslab/io.hpp"

namespace crosslab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  ordered_json details;
};

struct SuiteReport {
  std::vector<CriterionResult> criteria;
  bool all_pass = false;

  ordered_json to_json(uint64_t seed) const;
};

// Runs the full verification battery.  The final criterion reruns the whole
// battery with the same seed and compares the serialized reports byte for
// byte, so a suite invocation computes everything twice.
SuiteReport run_suite(uint64_t seed, int jobs);

// One formatted pass/fail line per criterion.
std::string format_suite_table(const SuiteReport& report);

}  // namespace crosslab
