#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdt/common/json.hpp"
#include "qdt/problem/problem.hpp"
#include "qdt/scalability/database.hpp"

namespace qdt::scalability {

inline constexpr const char* kAssessmentFile = "scalability_assessment.json";
inline constexpr const char* kRecommendedConfigFile = "recommended_config.yaml";
/// Database slice used when no class is declared.
inline constexpr const char* kGeneralSlice = "random_qubo";

struct ProblemCharacteristics {
  std::size_t n = 0;
  double density = 0.0;
  std::string declared_class;  // empty when undeclared
  std::string matched_class;   // database problem type
  double grid_density = 0.0;
  /// Set when the density is not on the database grid.
  std::string note;

  json to_json() const;
  static ProblemCharacteristics from_json(const json& doc);
};

/// Nearest grid density of `problem_type` in the database; ties go to the
/// lower density. Throws EmptyDatabaseSlice when the type is absent.
double nearest_grid_density(const ScalingDatabase& db, const std::string& problem_type, double density);

/// Size and slot density of Q matched against the database: the declared
/// class's slice if given, otherwise the general random-QUBO slice.
/// `class_density` replaces the slot density for class slices (graph
/// density for MaxCut, capacity ratio for Knapsack). Throws
/// EmptyDatabaseSlice for a zero matrix or a missing slice.
ProblemCharacteristics analyze_qubo(const problem::QuboMatrix& q, const ScalingDatabase& db,
                                    const std::optional<std::string>& declared_class = std::nullopt,
                                    std::optional<double> class_density = std::nullopt);

/// analyze_qubo on the instance's default formulation with its class
/// declared (unless `override_class` is given) and the class's own density.
ProblemCharacteristics analyze_instance(const problem::ProblemInstance& instance, const ScalingDatabase& db,
                                        const std::optional<std::string>& override_class = std::nullopt);

struct CombinationEntry {
  std::string vqa;
  std::string optimizer;
  std::vector<HypothesisEstimate> estimates;
  std::optional<double> worst_case;
  double n_calls = 0.0;
  std::size_t never_succeeds_sizes = 0;
  Status status = Status::NotCharacterizable;
  BenchmarkSettings benchmark;

  json to_json() const;
  static CombinationEntry from_json(const json& doc);
};

struct Recommendation {
  bool classical_fallback = true;
  std::string vqa;
  std::string optimizer;
  std::string rationale;

  json to_json() const;
  static Recommendation from_json(const json& doc);
};

struct Assessment {
  ProblemCharacteristics problem;
  /// Sorted by (vqa, optimizer).
  std::vector<CombinationEntry> entries;
  Recommendation recommendation;
  /// 2^n classical evaluations.
  double boundary = 0.0;
  /// "recommendation" | "estimation"
  std::string mode = "recommendation";

  const CombinationEntry* find(const std::string& vqa, const std::string& optimizer) const;
  json to_json() const;
  static Assessment from_json(const json& doc);
};

/// Estimates every combination of the matched slice, or just `combo`
/// (estimation mode), classifies each and attaches the recommendation.
/// Throws EmptyDatabaseSlice when `combo` is not in the slice.
Assessment assess(const ProblemCharacteristics& problem, const ScalingDatabase& db,
                  const std::optional<std::pair<std::string, std::string>>& combo = std::nullopt);

/// Lowest worst-case shots among feasible entries; ties by shots * calls,
/// then by (vqa, optimizer). No feasible entry gives the classical fallback.
Recommendation recommend(const Assessment& assessment);

/// Table rows in report order: per VQA, characterized entries by ascending
/// worst case, then the not-characterizable optimizers merged into one row.
std::string render_table(const Assessment& assessment);

/// Compact number format used by the table ("1.9e+06").
std::string format_shots(double shots);

struct OutputOptions {
  /// Tree config embedded under "tree".
  json tree = json::object();
  std::string backend = "local_simulator";
  std::uint64_t seed = 0;
};

/// Path assignments that reproduce the recommended benchmark setting on the
/// basic tree; the classical fallback selects the classical path.
json recommended_path(const Assessment& assessment, const OutputOptions& options);

/// Writes scalability_assessment.json and recommended_config.yaml into
/// `dir` (created if needed). Throws IoFailure.
void write_outputs(const Assessment& assessment, const std::filesystem::path& dir, const OutputOptions& options);

}  // namespace qdt::scalability
