#include "crosslab/io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace crosslab {

namespace {

void write_value(std::ostream& os, const ordered_json& v, int indent);

void write_indent(std::ostream& os, int indent) {
  for (int i = 0; i < indent; ++i) os << ' ';
}

void write_number(std::ostream& os, const ordered_json& v) {
  if (v.is_number_integer()) {
    os << v.get<int64_t>();
    return;
  }
  if (v.is_number_unsigned()) {
    os << v.get<uint64_t>();
    return;
  }
  const double d = v.get<double>();
  if (std::isnan(d)) {
    os << "\"nan\"";
  } else if (std::isinf(d)) {
    os << (d > 0 ? "\"inf\"" : "\"-inf\"");
  } else {
    os << fmt17(d);
  }
}

void write_value(std::ostream& os, const ordered_json& v, int indent) {
  switch (v.type()) {
    case nlohmann::json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      size_t k = 0;
      for (auto it = v.begin(); it != v.end(); ++it, ++k) {
        write_indent(os, indent + 2);
        os << ordered_json(it.key()).dump() << ": ";
        write_value(os, it.value(), indent + 2);
        if (k + 1 < v.size()) os << ",";
        os << "\n";
      }
      write_indent(os, indent);
      os << "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      bool scalars = true;
      for (const auto& e : v) scalars = scalars && !e.is_structured();
      if (scalars && v.size() <= 8) {
        os << "[";
        for (size_t i = 0; i < v.size(); ++i) {
          if (i) os << ", ";
          write_value(os, v[i], indent);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (size_t i = 0; i < v.size(); ++i) {
        write_indent(os, indent + 2);
        write_value(os, v[i], indent + 2);
        if (i + 1 < v.size()) os << ",";
        os << "\n";
      }
      write_indent(os, indent);
      os << "]";
      return;
    }
    case nlohmann::json::value_t::string:
      os << ordered_json(v.get<std::string>()).dump();
      return;
    case nlohmann::json::value_t::boolean:
      os << (v.get<bool>() ? "true" : "false");
      return;
    case nlohmann::json::value_t::null:
      os << "null";
      return;
    default:
      write_number(os, v);
      return;
  }
}

cplx cplx_from_json(const nlohmann::json& j, const char* context) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error("config.schema",
                std::string(context) + ": complex values are [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

ordered_json cplx_to_json(cplx z) {
  return ordered_json::array({z.real(), z.imag()});
}

ordered_json shape_to_json(const Shape& s) {
  ordered_json j;
  switch (s.kind) {
    case Shape::Kind::disc:
      j["shape"] = s.closed ? "closed_disc" : "disc";
      j["center"] = cplx_to_json(s.center);
      j["radius"] = s.r0;
      return j;
    case Shape::Kind::annulus:
      j["shape"] = s.closed ? "closed_annulus" : "annulus";
      j["center"] = cplx_to_json(s.center);
      j["r_in"] = s.r0;
      j["r_out"] = s.r1;
      return j;
    case Shape::Kind::rectangle:
      j["shape"] = s.closed ? "closed_rectangle" : "rectangle";
      j["corners"] = ordered_json::array(
          {cplx_to_json({s.x0, s.y0}), cplx_to_json({s.x1, s.y1})});
      return j;
    case Shape::Kind::union_of: {
      j["shape"] = "union";
      ordered_json parts = ordered_json::array();
      for (const Shape& c : s.children) parts.push_back(shape_to_json(c));
      j["parts"] = parts;
      return j;
    }
    case Shape::Kind::intersection_of: {
      j["shape"] = "intersection";
      ordered_json parts = ordered_json::array();
      for (const Shape& c : s.children) parts.push_back(shape_to_json(c));
      j["parts"] = parts;
      return j;
    }
    case Shape::Kind::difference:
      j["shape"] = "difference";
      j["parts"] = ordered_json::array(
          {shape_to_json(s.children[0]), shape_to_json(s.children[1])});
      return j;
    case Shape::Kind::minus_points: {
      j["shape"] = "minus_points";
      j["base"] = shape_to_json(s.children[0]);
      ordered_json pts = ordered_json::array();
      for (cplx p : s.removed) pts.push_back(cplx_to_json(p));
      j["points"] = pts;
      return j;
    }
    case Shape::Kind::eroded:
      j["shape"] = "eroded";
      j["eps"] = s.r0;
      j["base"] = shape_to_json(s.children[0]);
      return j;
  }
  return j;
}

double number_field(const nlohmann::json& j, const char* key, const char* context) {
  if (!j.contains(key) || !j[key].is_number())
    throw Error("config.schema",
                std::string(context) + ": missing numeric field '" + key + "'");
  return j[key].get<double>();
}

DomainSpec domain_from_json_impl(const nlohmann::json& j);
SetSpec set_from_json_impl(const nlohmann::json& j);

std::string shape_name(const nlohmann::json& j, const char* context) {
  if (!j.is_object() || !j.contains("shape") || !j["shape"].is_string())
    throw Error("config.schema",
                std::string(context) + ": expected an object with a 'shape' key");
  return j["shape"].get<std::string>();
}

std::pair<cplx, cplx> corners_field(const nlohmann::json& j, const char* context) {
  if (!j.contains("corners") || !j["corners"].is_array() || j["corners"].size() != 2)
    throw Error("config.schema",
                std::string(context) + ": 'corners' must list two points");
  return {cplx_from_json(j["corners"][0], context),
          cplx_from_json(j["corners"][1], context)};
}

DomainSpec domain_from_json_impl(const nlohmann::json& j) {
  const std::string kind = shape_name(j, "domain");
  if (kind == "disc") {
    require_keys(j, "domain disc", {"shape", "center", "radius"});
    return DomainSpec::disc(cplx_from_json(j["center"], "disc center"),
                            number_field(j, "radius", "disc"));
  }
  if (kind == "annulus") {
    require_keys(j, "domain annulus", {"shape", "center", "r_in", "r_out"});
    return DomainSpec::annulus(cplx_from_json(j["center"], "annulus center"),
                               number_field(j, "r_in", "annulus"),
                               number_field(j, "r_out", "annulus"));
  }
  if (kind == "rectangle") {
    require_keys(j, "domain rectangle", {"shape", "corners"});
    auto [lo, hi] = corners_field(j, "rectangle");
    return DomainSpec::rectangle(lo, hi);
  }
  if (kind == "union" || kind == "intersection") {
    require_keys(j, "domain boolean", {"shape", "parts"});
    if (!j.contains("parts") || !j["parts"].is_array())
      throw Error("config.schema", "boolean shape needs a 'parts' array");
    std::vector<DomainSpec> parts;
    for (const auto& part : j["parts"]) parts.push_back(domain_from_json_impl(part));
    return kind == "union" ? DomainSpec::union_of(std::move(parts))
                           : DomainSpec::intersection_of(std::move(parts));
  }
  if (kind == "difference") {
    require_keys(j, "domain difference", {"shape", "parts"});
    if (!j.contains("parts") || !j["parts"].is_array() || j["parts"].size() != 2)
      throw Error("config.schema", "difference needs exactly two parts");
    return DomainSpec::difference(domain_from_json_impl(j["parts"][0]),
                                  set_from_json_impl(j["parts"][1]));
  }
  if (kind == "eroded") {
    require_keys(j, "domain eroded", {"shape", "eps", "base"});
    Shape e;
    e.kind = Shape::Kind::eroded;
    e.r0 = number_field(j, "eps", "eroded");
    e.children.push_back(domain_from_json_impl(j["base"]).shape());
    return DomainSpec::from_shape(std::move(e));
  }
  throw Error("config.schema", "unknown domain shape '" + kind + "'");
}

SetSpec set_from_json_impl(const nlohmann::json& j) {
  const std::string kind = shape_name(j, "set");
  if (kind == "closed_disc") {
    require_keys(j, "set disc", {"shape", "center", "radius"});
    return SetSpec::disc(cplx_from_json(j["center"], "closed_disc center"),
                         number_field(j, "radius", "closed_disc"));
  }
  if (kind == "closed_annulus") {
    require_keys(j, "set annulus", {"shape", "center", "r_in", "r_out"});
    return SetSpec::annulus(cplx_from_json(j["center"], "closed_annulus center"),
                            number_field(j, "r_in", "closed_annulus"),
                            number_field(j, "r_out", "closed_annulus"));
  }
  if (kind == "closed_rectangle") {
    require_keys(j, "set rectangle", {"shape", "corners"});
    auto [lo, hi] = corners_field(j, "closed_rectangle");
    return SetSpec::rectangle(lo, hi);
  }
  if (kind == "union") {
    require_keys(j, "set union", {"shape", "parts"});
    if (!j.contains("parts") || !j["parts"].is_array())
      throw Error("config.schema", "union needs a 'parts' array");
    std::vector<SetSpec> parts;
    for (const auto& part : j["parts"]) parts.push_back(set_from_json_impl(part));
    return SetSpec::union_of(std::move(parts));
  }
  if (kind == "minus_points") {
    require_keys(j, "set minus_points", {"shape", "base", "points"});
    if (!j.contains("points") || !j["points"].is_array())
      throw Error("config.schema", "minus_points needs a 'points' array");
    std::vector<cplx> pts;
    for (const auto& p : j["points"]) pts.push_back(cplx_from_json(p, "minus_points"));
    return SetSpec::minus_points(set_from_json_impl(j["base"]), std::move(pts));
  }
  throw Error("config.schema", "unknown set shape '" + kind + "'");
}

}  // namespace

void write_json17(std::ostream& os, const ordered_json& doc) {
  write_value(os, doc, 0);
  os << "\n";
}

std::string json17_to_string(const ordered_json& doc) {
  std::ostringstream os;
  write_json17(os, doc);
  return os.str();
}

ordered_json domain_to_json(const DomainSpec& spec) {
  return shape_to_json(spec.shape());
}

ordered_json set_to_json(const SetSpec& spec) { return shape_to_json(spec.shape()); }

DomainSpec domain_from_json(const nlohmann::json& j) {
  return domain_from_json_impl(j);
}

SetSpec set_from_json(const nlohmann::json& j) { return set_from_json_impl(j); }

Grid grid_from_json(const nlohmann::json& j) {
  require_keys(j, "grid", {"rect", "nx", "ny"});
  if (!j.contains("rect") || !j["rect"].is_array() || j["rect"].size() != 2)
    throw Error("config.schema", "grid 'rect' must list two corner points");
  const cplx lo = cplx_from_json(j["rect"][0], "grid rect");
  const cplx hi = cplx_from_json(j["rect"][1], "grid rect");
  if (!j.contains("nx") || !j["nx"].is_number_integer() || !j.contains("ny") ||
      !j["ny"].is_number_integer())
    throw Error("config.schema", "grid needs integer nx and ny");
  return make_grid(lo.real(), lo.imag(), hi.real(), hi.imag(),
                   j["nx"].get<int>(), j["ny"].get<int>());
}

ordered_json grid_to_json(const Grid& grid) {
  ordered_json j;
  j["rect"] = ordered_json::array(
      {cplx_to_json({grid.x0, grid.y0}), cplx_to_json({grid.x1, grid.y1})});
  j["nx"] = grid.nx;
  j["ny"] = grid.ny;
  return j;
}

Poly2 poly2_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw Error("config.schema", "polynomial must be a nonempty coefficient matrix");
  Poly2 p;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty())
      throw Error("config.schema", "polynomial rows must be nonempty arrays");
    std::vector<cplx> r;
    for (const auto& entry : row) r.push_back(cplx_from_json(entry, "polynomial"));
    p.coef.push_back(std::move(r));
  }
  return p;
}

Poly1 poly1_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw Error("config.schema", "graph coefficients must be a nonempty array");
  Poly1 p;
  for (const auto& entry : j) p.coef.push_back(cplx_from_json(entry, "graph"));
  return p;
}

SingularSet singular_set_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw Error("config.schema", "singular_set must be an object");
  if (j.contains("poly")) {
    require_keys(j, "singular_set", {"poly"});
    return SingularSet::polynomial(poly2_from_json(j["poly"]));
  }
  if (j.contains("graphs")) {
    require_keys(j, "singular_set", {"graphs"});
    if (!j["graphs"].is_array() || j["graphs"].empty())
      throw Error("config.schema", "'graphs' must be a nonempty array");
    std::vector<Poly1> graphs;
    for (const auto& g : j["graphs"]) graphs.push_back(poly1_from_json(g));
    return SingularSet::graphs(std::move(graphs));
  }
  throw Error("config.schema", "singular_set needs 'poly' or 'graphs'");
}

void require_keys(const nlohmann::json& j, const char* context,
                  std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw Error("config.schema", std::string(context) + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed) ok = ok || it.key() == key;
    if (!ok)
      throw Error("config.schema",
                  std::string(context) + ": unknown key '" + it.key() + "'");
  }
}

}  // namespace crosslab
