#pragma once

// Family descriptors: {"family": name, "fixed": {...}}.
//
//   t_lambda, x_lambda          no fixed data
//   halfplane                   variant: "upper" | "lower" | "all" (default "all")
//   finite_powerset             k (default anchors) or anchors: [...]
//   shifted_union               N, optional anchors: [...]
//   piecewise_link              k, d
//   gaussian_link               d
//   harmonic2d                  m, optional coefficients: [c0, cos_1, sin_1, ...], min_abs_det
//   union                       parts: [descriptor, ...]

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vclab/families.hpp"

namespace vclab {

using json = nlohmann::json;

namespace detail {

template <class T>
T fixed_field(const json& fixed, const char* key, const std::string& family) {
  if (!fixed.contains(key)) throw ConfigError(family + ": missing fixed field '" + key + "'");
  try {
    return fixed.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(family + ": fixed field '" + key + "' has the wrong type");
  }
}

template <class T>
T fixed_field_or(const json& fixed, const char* key, T fallback, const std::string& family) {
  return fixed.contains(key) ? fixed_field<T>(fixed, key, family) : fallback;
}

inline std::size_t positive_size(const json& fixed, const char* key, const std::string& family) {
  const auto v = fixed_field<long long>(fixed, key, family);
  if (v < 1) throw ConfigError(family + ": '" + key + "' must be positive");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

inline FamilyHandle make_family(const json& spec) {
  if (!spec.is_object() || !spec.contains("family") || !spec["family"].is_string())
    throw ConfigError("family descriptor: expected an object with a string field 'family'");
  const auto name = spec["family"].get<std::string>();
  const json fixed = spec.value("fixed", json::object());
  if (!fixed.is_object()) throw ConfigError(name + ": 'fixed' must be an object");

  if (name == "t_lambda") return t_lambda_family();
  if (name == "x_lambda") return x_lambda_family();
  if (name == "halfplane") {
    const auto v = detail::fixed_field_or<std::string>(fixed, "variant", "all", name);
    if (v == "upper") return halfplane_family(HalfPlaneVariant::upper);
    if (v == "lower") return halfplane_family(HalfPlaneVariant::lower);
    if (v == "all") return halfplane_family(HalfPlaneVariant::all);
    throw ConfigError("halfplane: unknown variant '" + v + "'");
  }
  if (name == "finite_powerset") {
    if (fixed.contains("anchors")) return finite_powerset_family(detail::fixed_field<std::vector<double>>(fixed, "anchors", name));
    return finite_powerset_family(default_anchors(detail::positive_size(fixed, "k", name)));
  }
  if (name == "shifted_union") {
    const auto n = detail::positive_size(fixed, "N", name);
    if (fixed.contains("anchors")) return shifted_union_family(n, detail::fixed_field<std::vector<double>>(fixed, "anchors", name));
    return shifted_union_family(n);
  }
  if (name == "piecewise_link")
    return piecewise_link_family(detail::positive_size(fixed, "k", name), detail::positive_size(fixed, "d", name));
  if (name == "gaussian_link") return gaussian_link_family(detail::positive_size(fixed, "d", name));
  if (name == "harmonic2d")
    return harmonic2d_family(detail::positive_size(fixed, "m", name),
                             detail::fixed_field_or<std::vector<double>>(fixed, "coefficients", {}, name),
                             detail::fixed_field_or<double>(fixed, "min_abs_det", 1e-12, name));
  if (name == "union") {
    const auto parts = detail::fixed_field<std::vector<json>>(fixed, "parts", name);
    std::vector<FamilyHandle> handles;
    for (const auto& p : parts) handles.push_back(make_family(p));
    return union_family(std::move(handles));
  }
  throw ConfigError("unknown family '" + name + "'");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

inline FamilyHandle load_family(const std::string& path) { return make_family(read_json_file(path)); }

}  // namespace vclab
