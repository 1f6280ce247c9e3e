#include "qdt/tree/problem_data.hpp"

#include <cmath>

#include "qdt/common/error.hpp"

namespace qdt::tree {

std::string to_string(Direction direction) { return direction == Direction::Forward ? "forward" : "backward"; }

json ProvenanceEntry::to_json() const {
  return json{{"node", node}, {"keys", keys}, {"direction", to_string(direction)}};
}

void check_square_matrix(const json& value) {
  if (!value.is_array() || value.empty()) fail(ErrorCode::InvalidMatrix, "qubo_matrix must be a non-empty array of rows");
  const std::size_t n = value.size();
  for (const json& row : value) {
    if (!row.is_array() || row.size() != n)
      fail(ErrorCode::InvalidMatrix, "qubo_matrix must be square (" + std::to_string(n) + " rows)");
    for (const json& v : row)
      if (!v.is_number() || !std::isfinite(v.get<double>()))
        fail(ErrorCode::InvalidMatrix, "qubo_matrix entries must be finite numbers");
  }
}

const json& ProblemData::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) fail(ErrorCode::MissingKey, "ProblemData has no entry '" + key + "'");
  return it->second;
}

std::optional<json> ProblemData::find(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> ProblemData::keys() const {
  std::set<std::string> out;
  for (const auto& [k, v] : entries_) out.insert(k);
  return out;
}

void ProblemData::record_modification(const std::string& node, const Delta& delta, Direction direction,
                                      const std::set<std::string>& declared) {
  for (const auto& [key, value] : delta) {
    if (!declared.count(key))
      fail(ErrorCode::UndeclaredWrite, "node '" + node + "' wrote undeclared key '" + key + "'");
    if (key == kQuboKey) check_square_matrix(value);
  }
  ProvenanceEntry entry{node, {}, direction};
  for (const auto& [key, value] : delta) {
    entries_[key] = value;
    entry.keys.push_back(key);
  }
  provenance_.push_back(std::move(entry));
}

void ProblemData::inject(const std::string& key, json value, const std::string& origin) {
  if (key == kQuboKey) check_square_matrix(value);
  entries_[key] = std::move(value);
  provenance_.push_back({origin, {key}, Direction::Forward});
}

}  // namespace qdt::tree
