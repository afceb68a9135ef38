#pragma once

#include <optional>
#include <string>

#include "crosslab/cross.hpp"
#include "crosslab/extension.hpp"
#include "crosslab/io.hpp"

namespace crosslab {

// Typed views of the command config documents.  Parsers validate the schema
// and reject unknown keys.

struct ExtremalConfig {
  DomainSpec omega;
  SetSpec a;
  Grid grid;
  SolveParams params;
  bool usc = false;
};

struct EnvelopeConfig {
  std::optional<EnvelopeInputs> inputs;
  // Test hook: precomputed factor fields loaded from CSV instead of solving.
  std::string field_a_csv;
  std::string field_b_csv;
};

struct UniquenessCheck {
  int m = 1;
  int deg_z = 2, deg_w = 2;
  int count = 400;
  double threshold = 1e-10;
};

struct RemovabilityCheck {
  cplx center_z, center_w;
  double delta = 0.2, eps = 0.2;
  int n_quad = 64;
  std::optional<cplx> expected;
  double tol = 1e-8;
};

struct OverlapCheck {
  cplx xi_a, xi_b;   // base bidisc of the first local cross
  cplx eta_a, eta_b; // base bidisc of the second
  double rho = 0.15;
  int n_test = 200;
  double threshold = 1e-6;
};

struct VerifyConfig {
  Cross cross;
  Grid grid_z, grid_w;
  int refine = 4;
  SolveParams params{1e-9, 0, 1.9};
  SingularSet singular;
  GroundTruth truth;
  int fit_m = 1;
  int deg_z = 2, deg_w = 2;
  SampleStrategy sampling;
  long n_test = 500;
  uint64_t verify_seed = 11;
  double max_rel_error = 1e-6;
  std::optional<UniquenessCheck> uniqueness;
  std::optional<RemovabilityCheck> removability;
  std::optional<OverlapCheck> overlap;
};

SolveParams params_from_json(const nlohmann::json& j);
ExtremalConfig parse_extremal_config(const nlohmann::json& j);
EnvelopeConfig parse_envelope_config(const nlohmann::json& j);
VerifyConfig parse_verify_config(const nlohmann::json& j);

// Reads and parses a JSON document; parse failures carry code config.parse.
nlohmann::json load_json_file(const std::string& path);

}  // namespace crosslab
