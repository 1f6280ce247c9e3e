#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qdt/common/json.hpp"
#include "qdt/scalability/fits.hpp"

namespace qdt::scalability {

inline constexpr const char* kDatabaseSchema = "qdt.scaling-db/1";

struct Provenance {
  std::string plan_hash;
  std::uint64_t seed = 0;
  std::string date;

  json to_json() const;
  static Provenance from_json(const json& doc);
};

/// Settings a benchmark cell ran with; recommended configs reuse them so the
/// predicted shots match what gets executed.
struct BenchmarkSettings {
  json ansatz = json::object();     // {"id": builder id, "values": {...}}
  json optimizer = json::object();  // {"id": builder id, "values": {...}}
  std::uint64_t budget = 0;
  double delta = 0.05;

  json to_json() const;
  static BenchmarkSettings from_json(const json& doc);
};

/// One (problem type, density, vqa, optimizer, hypothesis) entry. The
/// cell-level data (thresholds, kappa, calls) repeats across the three
/// hypothesis records of a cell.
struct ScalingRecord {
  std::string problem_type;
  double density = 0.0;
  std::string vqa;
  std::string optimizer;
  ScalingFit fit;
  KappaFit kappa;
  CallsFit calls;
  std::vector<ThresholdPoint> thresholds;
  std::size_t never_succeeds_sizes = 0;
  BenchmarkSettings benchmark;
  Provenance provenance;
  /// Why the fit is missing or invalid, if it is.
  std::string note;

  Hypothesis hypothesis() const { return fit.hypothesis; }
  /// (problem_type, density, vqa, optimizer, hypothesis) as text.
  std::string key() const;

  json to_json() const;
  static ScalingRecord from_json(const json& doc);
};

class ScalingDatabase {
 public:
  std::vector<ScalingRecord> records;

  json to_json() const;
  /// Throws InvalidRecord on a schema mismatch.
  static ScalingDatabase from_json(const json& doc);
  /// Throws IoFailure.
  static ScalingDatabase load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// Appends records whose key is new; existing records stay untouched.
  /// Returns the number of records added.
  std::size_t merge(const ScalingDatabase& other);

  std::vector<const ScalingRecord*> slice(const std::string& problem_type, double density) const;
  /// Sorted distinct densities present for a problem type.
  std::vector<double> densities(const std::string& problem_type) const;
};

}  // namespace qdt::scalability
