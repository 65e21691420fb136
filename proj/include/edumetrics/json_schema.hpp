// SPDX-License-Identifier: Apache-2.0
#pragma once

// Validator for the subset of JSON Schema used by the report schemas:
// type (string or array), properties, required, additionalProperties
// (boolean or schema), items, enum, const, minimum, maximum, minLength.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace edumetrics::json_schema {

using nlohmann::json;

namespace detail {

inline bool has_type(const json& v, const std::string& t) {
  if (t == "null") return v.is_null();
  if (t == "boolean") return v.is_boolean();
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  return false;
}

inline void validate(const json& schema, const json& v, const std::string& path,
                     std::vector<std::string>& out) {
  const std::string where = path.empty() ? "/" : path;
  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_string()) {
      ok = has_type(v, it->get<std::string>());
    } else {
      for (const auto& t : *it) ok = ok || has_type(v, t.get<std::string>());
    }
    if (!ok) {
      out.push_back(where + ": expected type " + it->dump() + ", found " + v.type_name());
      return;
    }
  }
  if (auto it = schema.find("const"); it != schema.end() && *it != v)
    out.push_back(where + ": expected constant " + it->dump());
  if (auto it = schema.find("enum"); it != schema.end()) {
    bool found = false;
    for (const auto& e : *it) found = found || e == v;
    if (!found) out.push_back(where + ": value " + v.dump() + " not in " + it->dump());
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (auto it = schema.find("minimum"); it != schema.end() && x < it->get<double>())
      out.push_back(where + ": " + v.dump() + " below minimum " + it->dump());
    if (auto it = schema.find("maximum"); it != schema.end() && x > it->get<double>())
      out.push_back(where + ": " + v.dump() + " above maximum " + it->dump());
  }
  if (v.is_string()) {
    if (auto it = schema.find("minLength");
        it != schema.end() && v.get_ref<const std::string&>().size() < it->get<std::size_t>())
      out.push_back(where + ": string shorter than " + it->dump());
  }
  if (v.is_object()) {
    const json empty = json::object();
    const auto props_it = schema.find("properties");
    const json& props = props_it == schema.end() ? empty : *props_it;
    if (auto req = schema.find("required"); req != schema.end()) {
      for (const auto& k : *req)
        if (!v.contains(k.get<std::string>()))
          out.push_back(where + ": missing required member '" + k.get<std::string>() + "'");
    }
    const auto extra = schema.find("additionalProperties");
    for (const auto& [k, member] : v.items()) {
      const std::string child = path + "/" + k;
      if (auto p = props.find(k); p != props.end()) {
        validate(*p, member, child, out);
      } else if (extra != schema.end()) {
        if (extra->is_boolean()) {
          if (!extra->get<bool>()) out.push_back(child + ": member not allowed by schema");
        } else {
          validate(*extra, member, child, out);
        }
      }
    }
  }
  if (v.is_array()) {
    if (auto items = schema.find("items"); items != schema.end()) {
      for (std::size_t i = 0; i < v.size(); ++i)
        validate(*items, v[i], path + "/" + std::to_string(i), out);
    }
  }
}

}  // namespace detail

/// Every violation of `schema` by `instance`, as "<json pointer>: message".
inline std::vector<std::string> validate(const json& schema, const json& instance) {
  std::vector<std::string> out;
  detail::validate(schema, instance, "", out);
  return out;
}

}  // namespace edumetrics::json_schema
