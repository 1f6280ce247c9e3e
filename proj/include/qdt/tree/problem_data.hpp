#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qdt/common/json.hpp"

namespace qdt::tree {

enum class Direction { Forward, Backward };

std::string to_string(Direction direction);

/// Keys a node wrote; sorted so results serialize deterministically.
using Delta = std::map<std::string, json>;

struct ProvenanceEntry {
  std::string node;
  std::vector<std::string> keys;
  Direction direction = Direction::Forward;

  json to_json() const;
  friend bool operator==(const ProvenanceEntry&, const ProvenanceEntry&) = default;
};

/// Keyed store passed between nodes. Every write is attributed to a node and
/// the provenance log only grows.
class ProblemData {
 public:
  static constexpr const char* kInstanceKey = "problem_instance";
  static constexpr const char* kQuboKey = "qubo_matrix";

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  /// Throws MissingKey.
  const json& get(const std::string& key) const;
  std::optional<json> find(const std::string& key) const;
  std::set<std::string> keys() const;
  const std::map<std::string, json>& entries() const { return entries_; }
  const std::vector<ProvenanceEntry>& provenance() const { return provenance_; }

  /// Applies `delta` on behalf of `node` and logs it. Every key must be in
  /// `declared` (UndeclaredWrite); "qubo_matrix" must be a square numeric
  /// array (InvalidMatrix). Nothing is written when a check fails.
  void record_modification(const std::string& node, const Delta& delta, Direction direction,
                           const std::set<std::string>& declared);

  /// Engine-side write of an ingestion key.
  void inject(const std::string& key, json value, const std::string& origin);

 private:
  std::map<std::string, json> entries_;
  std::vector<ProvenanceEntry> provenance_;
};

/// Throws InvalidMatrix unless `value` is a non-empty square array of finite
/// numbers.
void check_square_matrix(const json& value);

}  // namespace qdt::tree
