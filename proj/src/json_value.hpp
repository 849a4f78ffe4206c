#pragma once

// Value <-> JSON, shared by the trace reader and the report writer.

#include "json.hpp"
#include "specmon/value.hpp"

namespace specmon::detail {

inline nlohmann::ordered_json value_to_json(const Value& v) {
  if (v.is_number()) return v.as_number();
  if (v.is_bool()) return v.as_bool();
  if (v.is_text()) return v.as_text();
  if (v.is_symbol()) return nlohmann::ordered_json{{"symbol", v.as_symbol()}};
  auto arr = nlohmann::ordered_json::array();
  for (const auto& x : v.as_list()) arr.push_back(value_to_json(x));
  return arr;
}

inline nlohmann::ordered_json bindings_to_json(const Bindings& b) {
  auto obj = nlohmann::ordered_json::object();
  for (const auto& [k, v] : b) obj[k] = value_to_json(v);
  return obj;
}

}  // namespace specmon::detail
