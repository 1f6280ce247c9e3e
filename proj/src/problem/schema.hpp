#pragma once

#include <cmath>
#include <initializer_list>
#include <string>
#include <string_view>

#include "qdt/common/error.hpp"
#include "qdt/common/json.hpp"

namespace qdt::problem::detail {

inline constexpr std::string_view kCommonKeys[] = {"problem_class", "formulation_mode", "name"};

[[noreturn]] inline void schema_error(const std::string& field, const std::string& reason) {
  fail(ErrorCode::SchemaViolation, "field '" + field + "': " + reason);
}

inline void reject_unknown_keys(const json& doc, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (auto k : kCommonKeys) known = known || key == k;
    for (auto k : allowed) known = known || key == k;
    if (!known) schema_error(key, "unknown field");
  }
}

inline const json& require(const json& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) schema_error(key, "missing required field");
  return *it;
}

inline double finite_number(const json& v, const std::string& field) {
  if (!v.is_number()) schema_error(field, "expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) schema_error(field, "must be finite");
  return d;
}

inline long long integer(const json& v, const std::string& field) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::isfinite(d) && std::floor(d) == d) return static_cast<long long>(d);
  }
  schema_error(field, "expected an integer");
}

}  // namespace qdt::problem::detail
