#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "nlohmann/json.hpp"

namespace stopscape::detail {

// Missing keys and explicit nulls are both "absent".
inline nlohmann::json const* field(nlohmann::json const& obj, char const* key) {
  auto const it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    return nullptr;
  }
  return &*it;
}

inline std::optional<double> optional_number(nlohmann::json const& obj,
                                             char const* key) {
  auto const* v = field(obj, key);
  if (v == nullptr || !v->is_number()) {
    return std::nullopt;
  }
  return v->get<double>();
}

// Identifiers arrive as strings or bare integers depending on the feed.
inline std::optional<std::string> optional_identifier(
    nlohmann::json const& obj, char const* key) {
  auto const* v = field(obj, key);
  if (v == nullptr) {
    return std::nullopt;
  }
  if (v->is_string()) {
    return v->get<std::string>();
  }
  if (v->is_number_integer()) {
    return v->dump();
  }
  return std::nullopt;
}

}  // namespace stopscape::detail
