#pragma once

// Path-annotated accessors shared by the JSON readers.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

namespace coexist::detail {

inline std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline std::string index_path(const std::string& path, std::size_t i) {
  return fmt::format("{}[{}]", path, i);
}

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
  throw std::invalid_argument(fmt::format("{}: {}", path, what));
}

// Rejects keys outside `allowed` so a misspelt optional field is not silently
// replaced by its default.
inline void expect_keys(const nlohmann::json& j, const std::string& path,
                        std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) schema_error(path, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || item.key() == a;
    if (!known) schema_error(join_path(path, item.key()), "unknown field");
  }
}

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& key,
                                     const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(join_path(path, key), "required field is missing");
  return *it;
}

inline double as_number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(path, "expected a finite number");
  return v;
}

inline double number(const nlohmann::json& j, const std::string& key, const std::string& path) {
  return as_number(require(j, key, path), join_path(path, key));
}

inline double number_or(const nlohmann::json& j, const std::string& key, const std::string& path,
                        double fallback) {
  if (!j.is_object()) schema_error(path, "expected an object");
  auto it = j.find(key);
  return it == j.end() ? fallback : as_number(*it, join_path(path, key));
}

inline std::int64_t integer(const nlohmann::json& j, const std::string& key,
                            const std::string& path) {
  const auto& v = require(j, key, path);
  if (!v.is_number_integer()) schema_error(join_path(path, key), "expected an integer");
  return v.get<std::int64_t>();
}

inline std::int64_t integer_or(const nlohmann::json& j, const std::string& key,
                               const std::string& path, std::int64_t fallback) {
  if (!j.is_object()) schema_error(path, "expected an object");
  return j.contains(key) ? integer(j, key, path) : fallback;
}

inline std::uint64_t unsigned_or(const nlohmann::json& j, const std::string& key,
                                 const std::string& path, std::uint64_t fallback) {
  if (!j.is_object()) schema_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  const bool ok = it->is_number_unsigned() || (it->is_number_integer() && it->get<std::int64_t>() >= 0);
  if (!ok) schema_error(join_path(path, key), "expected a non-negative integer");
  return it->get<std::uint64_t>();
}

inline std::string string(const nlohmann::json& j, const std::string& key, const std::string& path) {
  const auto& v = require(j, key, path);
  if (!v.is_string()) schema_error(join_path(path, key), "expected a string");
  return v.get<std::string>();
}

inline std::string string_or(const nlohmann::json& j, const std::string& key,
                             const std::string& path, const std::string& fallback) {
  if (!j.is_object()) schema_error(path, "expected an object");
  return j.contains(key) ? string(j, key, path) : fallback;
}

inline bool boolean_or(const nlohmann::json& j, const std::string& key, const std::string& path,
                       bool fallback) {
  if (!j.is_object()) schema_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) schema_error(join_path(path, key), "expected true or false");
  return it->get<bool>();
}

inline const nlohmann::json& array(const nlohmann::json& j, const std::string& key,
                                   const std::string& path) {
  const auto& v = require(j, key, path);
  if (!v.is_array()) schema_error(join_path(path, key), "expected an array");
  return v;
}

// Re-throws range errors from the strong types with the JSON path attached.
template <typename F>
auto at_path(const std::string& path, F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const std::exception& e) {
    schema_error(path, e.what());
  }
}

}  // namespace coexist::detail
