#include "crosslab/config.hpp"

#include <fstream>

namespace crosslab {

namespace {

cplx cplx_field(const nlohmann::json& j, const char* key, const char* context) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2)
    throw Error("config.schema",
                std::string(context) + ": '" + key + "' must be [re, im]");
  return {j[key][0].get<double>(), j[key][1].get<double>()};
}

int int_field(const nlohmann::json& j, const char* key, const char* context,
              std::optional<int> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw Error("config.schema",
                std::string(context) + ": missing integer field '" + key + "'");
  }
  if (!j[key].is_number_integer())
    throw Error("config.schema",
                std::string(context) + ": '" + key + "' must be an integer");
  return j[key].get<int>();
}

double double_field(const nlohmann::json& j, const char* key, const char* context,
                    std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw Error("config.schema",
                std::string(context) + ": missing numeric field '" + key + "'");
  }
  if (!j[key].is_number())
    throw Error("config.schema",
                std::string(context) + ": '" + key + "' must be a number");
  return j[key].get<double>();
}

std::pair<int, int> deg_field(const nlohmann::json& j, const char* context) {
  if (!j.contains("deg") || !j["deg"].is_array() || j["deg"].size() != 2 ||
      !j["deg"][0].is_number_integer() || !j["deg"][1].is_number_integer())
    throw Error("config.schema",
                std::string(context) + ": 'deg' must be [deg_z, deg_w]");
  return {j["deg"][0].get<int>(), j["deg"][1].get<int>()};
}

Cross cross_from_json(const nlohmann::json& j) {
  require_keys(j, "cross", {"d", "a", "g", "b"});
  for (const char* key : {"d", "a", "g", "b"})
    if (!j.contains(key))
      throw Error("config.schema", std::string("cross: missing '") + key + "'");
  return Cross{domain_from_json(j["d"]), set_from_json(j["a"]),
               domain_from_json(j["g"]), set_from_json(j["b"])};
}

}  // namespace

SolveParams params_from_json(const nlohmann::json& j) {
  require_keys(j, "params", {"tol", "max_iter", "relaxation"});
  SolveParams p;
  p.tol = double_field(j, "tol", "params", p.tol);
  p.max_iter = int_field(j, "max_iter", "params", p.max_iter);
  p.relaxation = double_field(j, "relaxation", "params", p.relaxation);
  return p;
}

ExtremalConfig parse_extremal_config(const nlohmann::json& j) {
  require_keys(j, "extremal config", {"omega", "a", "grid", "params", "usc"});
  for (const char* key : {"omega", "a", "grid"})
    if (!j.contains(key))
      throw Error("config.schema",
                  std::string("extremal config: missing '") + key + "'");
  ExtremalConfig cfg{domain_from_json(j["omega"]), set_from_json(j["a"]),
                     grid_from_json(j["grid"]), {}, false};
  if (j.contains("params")) cfg.params = params_from_json(j["params"]);
  if (j.contains("usc")) {
    if (!j["usc"].is_boolean())
      throw Error("config.schema", "extremal config: 'usc' must be a boolean");
    cfg.usc = j["usc"].get<bool>();
  }
  return cfg;
}

EnvelopeConfig parse_envelope_config(const nlohmann::json& j) {
  EnvelopeConfig cfg;
  if (j.contains("field_a_csv") || j.contains("field_b_csv")) {
    require_keys(j, "envelope config", {"field_a_csv", "field_b_csv"});
    if (!j.contains("field_a_csv") || !j.contains("field_b_csv") ||
        !j["field_a_csv"].is_string() || !j["field_b_csv"].is_string())
      throw Error("config.schema",
                  "envelope config: both field CSV paths are required");
    cfg.field_a_csv = j["field_a_csv"].get<std::string>();
    cfg.field_b_csv = j["field_b_csv"].get<std::string>();
    return cfg;
  }
  require_keys(j, "envelope config",
               {"d", "a", "g", "b", "grid_z", "grid_w", "params", "refine"});
  for (const char* key : {"d", "a", "g", "b", "grid_z", "grid_w"})
    if (!j.contains(key))
      throw Error("config.schema",
                  std::string("envelope config: missing '") + key + "'");
  EnvelopeInputs in{domain_from_json(j["d"]),  set_from_json(j["a"]),
                    domain_from_json(j["g"]),  set_from_json(j["b"]),
                    grid_from_json(j["grid_z"]), grid_from_json(j["grid_w"])};
  if (j.contains("params")) in.params = params_from_json(j["params"]);
  in.refine = int_field(j, "refine", "envelope config", in.refine);
  if (in.refine < 1)
    throw Error("config.schema", "envelope config: 'refine' must be positive");
  cfg.inputs = std::move(in);
  return cfg;
}

VerifyConfig parse_verify_config(const nlohmann::json& j) {
  require_keys(j, "verify config",
               {"cross", "grids", "refine", "params", "singular_set",
                "ground_truth", "fit", "sampling", "verify", "checks"});
  for (const char* key :
       {"cross", "grids", "singular_set", "ground_truth", "fit", "sampling",
        "verify"})
    if (!j.contains(key))
      throw Error("config.schema",
                  std::string("verify config: missing '") + key + "'");

  VerifyConfig cfg;
  cfg.cross = cross_from_json(j["cross"]);

  require_keys(j["grids"], "grids", {"grid_z", "grid_w"});
  if (!j["grids"].contains("grid_z") || !j["grids"].contains("grid_w"))
    throw Error("config.schema", "grids: both grid_z and grid_w are required");
  cfg.grid_z = grid_from_json(j["grids"]["grid_z"]);
  cfg.grid_w = grid_from_json(j["grids"]["grid_w"]);
  cfg.refine = int_field(j, "refine", "verify config", cfg.refine);
  if (j.contains("params")) cfg.params = params_from_json(j["params"]);

  cfg.singular = singular_set_from_json(j["singular_set"]);

  require_keys(j["ground_truth"], "ground_truth", {"numerator", "pole_order"});
  if (!j["ground_truth"].contains("numerator"))
    throw Error("config.schema", "ground_truth: missing 'numerator'");
  cfg.truth.numerator = poly2_from_json(j["ground_truth"]["numerator"]);
  cfg.truth.pole_order = int_field(j["ground_truth"], "pole_order", "ground_truth", 0);
  if (cfg.truth.pole_order < 0)
    throw Error("config.schema", "ground_truth: pole_order must be >= 0");
  cfg.truth.denominator_base = cfg.singular.to_polynomial();

  require_keys(j["fit"], "fit", {"m", "deg"});
  cfg.fit_m = int_field(j["fit"], "m", "fit");
  std::tie(cfg.deg_z, cfg.deg_w) = deg_field(j["fit"], "fit");

  require_keys(j["sampling"], "sampling",
               {"count_ab", "count_db", "seed", "clearance"});
  cfg.sampling.count_ab = int_field(j["sampling"], "count_ab", "sampling");
  cfg.sampling.count_db = int_field(j["sampling"], "count_db", "sampling");
  cfg.sampling.seed =
      static_cast<uint64_t>(int_field(j["sampling"], "seed", "sampling", 1));
  cfg.sampling.clearance = double_field(j["sampling"], "clearance", "sampling", -1.0);

  require_keys(j["verify"], "verify", {"n_test", "seed", "max_rel_error"});
  cfg.n_test = int_field(j["verify"], "n_test", "verify");
  cfg.verify_seed =
      static_cast<uint64_t>(int_field(j["verify"], "seed", "verify", 11));
  cfg.max_rel_error = double_field(j["verify"], "max_rel_error", "verify");

  if (j.contains("checks")) {
    const auto& checks = j["checks"];
    require_keys(checks, "checks", {"uniqueness", "removability", "overlap"});
    if (checks.contains("uniqueness")) {
      const auto& u = checks["uniqueness"];
      require_keys(u, "uniqueness", {"m", "deg", "count", "threshold"});
      UniquenessCheck uc;
      uc.m = int_field(u, "m", "uniqueness", cfg.fit_m);
      std::tie(uc.deg_z, uc.deg_w) = deg_field(u, "uniqueness");
      uc.count = int_field(u, "count", "uniqueness", 400);
      uc.threshold = double_field(u, "threshold", "uniqueness", 1e-10);
      cfg.uniqueness = uc;
    }
    if (checks.contains("removability")) {
      const auto& r = checks["removability"];
      require_keys(r, "removability",
                   {"center_z", "center_w", "radii", "n_quad", "expected", "tol"});
      RemovabilityCheck rc;
      rc.center_z = cplx_field(r, "center_z", "removability");
      rc.center_w = cplx_field(r, "center_w", "removability");
      if (!r.contains("radii") || !r["radii"].is_array() || r["radii"].size() != 2)
        throw Error("config.schema", "removability: 'radii' must be [delta, eps]");
      rc.delta = r["radii"][0].get<double>();
      rc.eps = r["radii"][1].get<double>();
      rc.n_quad = int_field(r, "n_quad", "removability", 64);
      if (r.contains("expected")) rc.expected = cplx_field(r, "expected", "removability");
      rc.tol = double_field(r, "tol", "removability", 1e-8);
      cfg.removability = rc;
    }
    if (checks.contains("overlap")) {
      const auto& o = checks["overlap"];
      require_keys(o, "overlap", {"xi", "eta", "rho", "n_test", "threshold"});
      OverlapCheck oc;
      for (const char* key : {"xi", "eta"})
        if (!o.contains(key) || !o[key].is_array() || o[key].size() != 2)
          throw Error("config.schema",
                      std::string("overlap: '") + key + "' must be [[a],[b]]");
      oc.xi_a = {o["xi"][0][0].get<double>(), o["xi"][0][1].get<double>()};
      oc.xi_b = {o["xi"][1][0].get<double>(), o["xi"][1][1].get<double>()};
      oc.eta_a = {o["eta"][0][0].get<double>(), o["eta"][0][1].get<double>()};
      oc.eta_b = {o["eta"][1][0].get<double>(), o["eta"][1][1].get<double>()};
      oc.rho = double_field(o, "rho", "overlap", 0.15);
      oc.n_test = int_field(o, "n_test", "overlap", 200);
      oc.threshold = double_field(o, "threshold", "overlap", 1e-6);
      cfg.overlap = oc;
    }
  }
  return cfg;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config.parse", "cannot open config file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("config.parse", e.what());
  }
}

}  // namespace crosslab
