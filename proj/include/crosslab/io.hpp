#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "crosslab/extremal.hpp"
#include "crosslab/geometry.hpp"
#include "crosslab/polynomial.hpp"
#include "crosslab/singularity.hpp"

namespace crosslab {

using ordered_json = nlohmann::ordered_json;

// Serializer used for every report artifact: keys in insertion order,
// floating-point numbers printed with 17 significant digits, two-space
// indentation.  Byte-identical output for identical document values.
void write_json17(std::ostream& os, const ordered_json& doc);
std::string json17_to_string(const ordered_json& doc);

// Spec object trees:  {"shape":"disc","center":[x,y],"radius":r} and the
// closed_* / union / intersection / difference / minus_points / eroded
// variants.  Unknown keys are rejected.
ordered_json domain_to_json(const DomainSpec& spec);
ordered_json set_to_json(const SetSpec& spec);
DomainSpec domain_from_json(const nlohmann::json& j);
SetSpec set_from_json(const nlohmann::json& j);

Grid grid_from_json(const nlohmann::json& j);
ordered_json grid_to_json(const Grid& grid);

// Coefficient matrix: rows by z-power, columns by w-power, complex entries
// as [re, im].
Poly2 poly2_from_json(const nlohmann::json& j);
Poly1 poly1_from_json(const nlohmann::json& j);
SingularSet singular_set_from_json(const nlohmann::json& j);

// Throws config.schema when `j` is not an object or carries keys outside
// `allowed`.
void require_keys(const nlohmann::json& j, const char* context,
                  std::initializer_list<const char*> allowed);

}  // namespace crosslab
