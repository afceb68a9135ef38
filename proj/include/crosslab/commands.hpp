#pragma once

#include <optional>
#include <string>

namespace crosslab {

struct CliOptions {
  std::string config_path;
  std::string out_dir;          // artifacts land here; empty skips file output
  std::optional<uint64_t> seed; // overrides config seeds
  std::optional<double> tol;    // overrides solver tolerance
  std::optional<int> max_iter;  // overrides the sweep budget
  std::optional<double> relax;  // overrides the SOR factor
  int jobs = 0;                 // 0 selects the hardware concurrency
};

// Exit codes: 0 success, 1 computation or threshold failure, 2 config or
// input error.  Failures print a JSON error record on stdout.
int cmd_extremal(const CliOptions& opt);
int cmd_envelope(const CliOptions& opt);
int cmd_verify(const CliOptions& opt);
int cmd_suite(const CliOptions& opt);

}  // namespace crosslab
