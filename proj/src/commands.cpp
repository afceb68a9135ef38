#include "crosslab/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "crosslab/config.hpp"
#include "crosslab/suite.hpp"

namespace crosslab {

namespace {

namespace fs = std::filesystem;

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / name, std::ios::binary);
  if (!out) throw Error("io.write", "cannot write " + name + " under " + dir);
  out << content;
}

void emit_error(const CliOptions& opt, const Error& e) {
  ordered_json doc;
  doc["error"]["code"] = e.code();
  doc["error"]["message"] = e.what();
  const std::string text = json17_to_string(doc);
  std::cout << text;
  if (!opt.out_dir.empty()) {
    try {
      write_file(opt.out_dir, "error.json", text);
    } catch (...) {
    }
  }
}

int exit_code_for(const Error& e) {
  const std::string& c = e.code();
  return (c.rfind("config.", 0) == 0 || c.rfind("io.", 0) == 0) ? 2 : 1;
}

int run_guarded(const CliOptions& opt, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    emit_error(opt, e);
    return exit_code_for(e);
  } catch (const std::exception& e) {
    emit_error(opt, Error("internal", e.what()));
    return 1;
  }
}

std::string stream_to_string(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

void apply_solver_overrides(const CliOptions& opt, SolveParams& params) {
  if (opt.tol) params.tol = *opt.tol;
  if (opt.max_iter) params.max_iter = *opt.max_iter;
  if (opt.relax) params.relaxation = *opt.relax;
}

}  // namespace

int cmd_extremal(const CliOptions& opt) {
  return run_guarded(opt, [&] {
    ExtremalConfig cfg = parse_extremal_config(load_json_file(opt.config_path));
    apply_solver_overrides(opt, cfg.params);

    SolveResult sol =
        solve_condenser_field(cfg.omega, cfg.a, cfg.grid, cfg.params, 1);
    ScalarField field =
        cfg.usc ? regularize_usc(sol.field) : std::move(sol.field);

    write_file(opt.out_dir, "field.csv",
               stream_to_string([&](std::ostream& os) { field.to_csv(os); }));
    write_file(opt.out_dir, "field.pgm",
               stream_to_string([&](std::ostream& os) { field.to_pgm(os); }));

    ordered_json summary;
    summary["max"] = field.max_value();
    summary["min"] = field.min_value();
    summary["iterations"] = sol.iterations;
    summary["residual"] = sol.residual;
    const std::string text = json17_to_string(summary);
    write_file(opt.out_dir, "summary.json", text);
    std::cout << text;
    return 0;
  });
}

int cmd_envelope(const CliOptions& opt) {
  return run_guarded(opt, [&] {
    EnvelopeConfig cfg = parse_envelope_config(load_json_file(opt.config_path));

    std::optional<EnvelopeResult> env;
    if (cfg.inputs) {
      apply_solver_overrides(opt, cfg.inputs->params);
      env = compute_envelope(*cfg.inputs, opt.jobs);
    } else {
      auto load_field = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("io.read", "cannot open field csv: " + path);
        return ScalarField::from_csv(in);
      };
      ScalarField fa = load_field(cfg.field_a_csv);
      ScalarField fb = load_field(cfg.field_b_csv);
      ProductMask mask = envelope_mask(fa, fb, opt.jobs);
      const double denom = static_cast<double>(fa.domain.count()) *
                           static_cast<double>(fb.domain.count());
      EnvelopeResult res{std::move(fa), std::move(fb), std::move(mask), 0.0, 0};
      res.volume_fraction =
          denom > 0 ? static_cast<double>(res.env.count()) / denom : 0.0;
      res.component_count = connected_components(res.env).count;
      env = std::move(res);
    }

    write_file(opt.out_dir, "envelope.rle.csv",
               stream_to_string([&](std::ostream& os) { env->env.to_rle_csv(os); }));

    ordered_json summary;
    summary["volume_fraction"] = env->volume_fraction;
    summary["component_count"] = env->component_count;
    summary["flagged_pairs"] = env->env.count();
    const std::string text = json17_to_string(summary);
    write_file(opt.out_dir, "summary.json", text);
    std::cout << text;
    return 0;
  });
}

int cmd_verify(const CliOptions& opt) {
  return run_guarded(opt, [&] {
    VerifyConfig cfg = parse_verify_config(load_json_file(opt.config_path));
    apply_solver_overrides(opt, cfg.params);
    if (opt.seed) {
      cfg.sampling.seed = *opt.seed;
      cfg.verify_seed = hash_combine(*opt.seed, 1);
    }

    EnvelopeInputs env_in{cfg.cross.d,  cfg.cross.a, cfg.cross.g, cfg.cross.b,
                          cfg.grid_z, cfg.grid_w};
    env_in.params = cfg.params;
    env_in.refine = cfg.refine;
    const EnvelopeResult env = compute_envelope(env_in, opt.jobs);
    const ProductMask trace = envelope_trace(cfg.singular, env.env, opt.jobs);

    const SampleSet samples =
        sample_cross(cfg.truth, cfg.cross, cfg.singular, cfg.sampling);
    const RationalApproximant fit =
        fit_rational(samples, cfg.singular, cfg.fit_m, cfg.deg_z, cfg.deg_w);
    const ErrorReport report =
        verify_extension(fit, cfg.truth, env.env, trace, cfg.n_test,
                         cfg.verify_seed, cfg.sampling.clearance);

    bool pass = report.max_rel_error <= cfg.max_rel_error;

    ordered_json doc;
    doc["command"] = "verify";
    doc["fit"]["m"] = cfg.fit_m;
    doc["fit"]["deg"] = ordered_json::array({cfg.deg_z, cfg.deg_w});
    doc["fit"]["conditioning"] = fit.conditioning;
    doc["samples"]["count_ab"] = cfg.sampling.count_ab;
    doc["samples"]["count_db"] = cfg.sampling.count_db;
    doc["envelope"]["volume_fraction"] = env.volume_fraction;
    doc["envelope"]["component_count"] = env.component_count;
    doc["error_report"]["max_rel_error"] = report.max_rel_error;
    doc["error_report"]["mean_rel_error"] = report.mean_rel_error;
    doc["error_report"]["n_test_points"] = report.n_test_points;
    doc["error_report"]["region"] = report.region;
    doc["error_report"]["threshold"] = cfg.max_rel_error;

    if (cfg.uniqueness) {
      SampleStrategy strat = cfg.sampling;
      strat.count_ab = cfg.uniqueness->count;
      strat.seed = hash_combine(cfg.sampling.seed, 40);
      const double residual =
          uniqueness_residual(cfg.cross, cfg.singular, cfg.uniqueness->m,
                              cfg.uniqueness->deg_z, cfg.uniqueness->deg_w, strat);
      const bool ok = residual <= cfg.uniqueness->threshold;
      pass = pass && ok;
      doc["checks"]["uniqueness"]["residual"] = residual;
      doc["checks"]["uniqueness"]["threshold"] = cfg.uniqueness->threshold;
      doc["checks"]["uniqueness"]["pass"] = ok;
    }
    if (cfg.removability) {
      const RemovabilityCheck& rc = *cfg.removability;
      const GroundTruth& f = cfg.truth;
      const cplx v = cauchy_reconstruct(
          [&](cplx z, cplx w) { return f.eval(z, w); }, rc.center_z, rc.center_w,
          rc.delta, rc.eps, rc.n_quad);
      bool ok = true;
      if (rc.expected) ok = std::abs(v - *rc.expected) <= rc.tol;
      pass = pass && ok;
      doc["checks"]["removability"]["value"] =
          ordered_json::array({v.real(), v.imag()});
      if (rc.expected)
        doc["checks"]["removability"]["error"] = std::abs(v - *rc.expected);
      doc["checks"]["removability"]["pass"] = ok;
    }
    if (cfg.overlap) {
      const OverlapCheck& oc = *cfg.overlap;
      auto local_fit = [&](cplx az, cplx bw, uint64_t s) {
        const Cross local{cfg.cross.d, SetSpec::disc(az, oc.rho), cfg.cross.g,
                          SetSpec::disc(bw, oc.rho)};
        SampleStrategy strat = cfg.sampling;
        strat.seed = s;
        const SampleSet samp = sample_cross(cfg.truth, local, cfg.singular, strat);
        return fit_rational(samp, cfg.singular, cfg.fit_m, cfg.deg_z, cfg.deg_w);
      };
      const RationalApproximant f1 =
          local_fit(oc.xi_a, oc.xi_b, hash_combine(cfg.sampling.seed, 41));
      const RationalApproximant f2 =
          local_fit(oc.eta_a, oc.eta_b, hash_combine(cfg.sampling.seed, 42));
      auto local_env = [&](cplx az, cplx bw) {
        EnvelopeInputs in{cfg.cross.d, SetSpec::disc(az, oc.rho), cfg.cross.g,
                          SetSpec::disc(bw, oc.rho), cfg.grid_z, cfg.grid_w};
        in.params = cfg.params;
        in.refine = cfg.refine;
        return compute_envelope(in, opt.jobs);
      };
      ProductMask overlap =
          local_env(oc.xi_a, oc.xi_b).env.intersect(local_env(oc.eta_a, oc.eta_b).env);
      overlap = overlap.minus(envelope_trace(cfg.singular, overlap, opt.jobs));
      const double disc = local_overlap_consistency(
          f1, f2, overlap, oc.n_test, hash_combine(cfg.sampling.seed, 43),
          cfg.sampling.clearance);
      const bool ok = disc <= oc.threshold;
      pass = pass && ok;
      doc["checks"]["overlap"]["discrepancy"] = disc;
      doc["checks"]["overlap"]["threshold"] = oc.threshold;
      doc["checks"]["overlap"]["pass"] = ok;
    }

    doc["pass"] = pass;
    const std::string text = json17_to_string(doc);
    write_file(opt.out_dir, "report.json", text);
    std::cout << text;
    return pass ? 0 : 1;
  });
}

int cmd_suite(const CliOptions& opt) {
  return run_guarded(opt, [&] {
    const uint64_t seed = opt.seed.value_or(7);
    const SuiteReport report = run_suite(seed, opt.jobs);
    const std::string text = json17_to_string(report.to_json(seed));
    write_file(opt.out_dir, "suite_report.json", text);
    std::cout << format_suite_table(report);
    return report.all_pass ? 0 : 1;
  });
}

}  // namespace crosslab
