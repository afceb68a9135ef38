// crosslab: relative extremal functions, cross envelopes and rational
// re-extension checks for planar condenser configurations.

#include <CLI11.hpp>

#include "crosslab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for cross envelopes with singular sets"};
  app.require_subcommand(1);

  crosslab::CliOptions opt;
  uint64_t seed = 0;
  double tol = 0;
  int max_iter = 0;
  double relax = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* cfg = cmd->add_option("--config", opt.config_path, "config JSON path");
    if (needs_config) cfg->required();
    cmd->add_option("--out", opt.out_dir, "output directory for artifacts");
    cmd->add_option("--jobs", opt.jobs, "worker pool size (0 = logical CPUs)");
    cmd->add_option("--seed", seed, "seed override");
    cmd->add_option("--tol", tol, "solver tolerance override");
    cmd->add_option("--max-iter", max_iter, "solver sweep budget override");
    cmd->add_option("--relax", relax, "solver relaxation factor override");
  };

  CLI::App* extremal =
      app.add_subcommand("extremal", "solve a relative extremal field");
  add_common(extremal, true);
  CLI::App* envelope =
      app.add_subcommand("envelope", "compute a cross envelope mask");
  add_common(envelope, true);
  CLI::App* verify = app.add_subcommand(
      "verify", "sample, fit and verify a rational extension");
  add_common(verify, true);
  CLI::App* suite =
      app.add_subcommand("suite", "run the acceptance battery and report");
  add_common(suite, false);

  CLI11_PARSE(app, argc, argv);

  CLI::App* active = app.get_subcommands().front();
  if (active->count("--seed")) opt.seed = seed;
  if (active->count("--tol")) opt.tol = tol;
  if (active->count("--max-iter")) opt.max_iter = max_iter;
  if (active->count("--relax")) opt.relax = relax;

  if (active == extremal) return crosslab::cmd_extremal(opt);
  if (active == envelope) return crosslab::cmd_envelope(opt);
  if (active == verify) return crosslab::cmd_verify(opt);
  return crosslab::cmd_suite(opt);
}
