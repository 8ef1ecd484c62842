#pragma once

#include <string>
#include <type_traits>

#include <json.hpp>

#include "smacsim/errors.hpp"

namespace smacsim::detail {

// Typed read of a JSON value; `path` names the field in error messages.
template <typename T>
T read_json(const nlohmann::json& v, const std::string& path) {
  bool ok = false;
  if constexpr (std::is_same_v<T, bool>) ok = v.is_boolean();
  else if constexpr (std::is_integral_v<T>) ok = v.is_number_integer();
  else if constexpr (std::is_floating_point_v<T>) ok = v.is_number();
  else if constexpr (std::is_same_v<T, std::string>) ok = v.is_string();
  if (!ok) throw ConfigError("field " + path + ": wrong type (got " + std::string(v.type_name()) + ")");
  return v.get<T>();
}

}  // namespace smacsim::detail
