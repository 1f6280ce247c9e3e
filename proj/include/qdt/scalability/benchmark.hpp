#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdt/common/json.hpp"
#include "qdt/problem/qubo.hpp"
#include "qdt/quantum/circuit.hpp"
#include "qdt/scalability/database.hpp"
#include "qdt/vqa/ansatz.hpp"

namespace qdt::scalability {

/// Default relative optimality gap counted as success.
inline constexpr double kDefaultDelta = 0.05;

/// One VQA/optimizer pairing as the benchmark runs it. Builder ids and
/// values go through the builder registry.
struct TrialSetup {
  std::string ansatz_id = "qaoa";
  json ansatz_values = json::object();
  std::string optimizer_id = "spsa";
  json optimizer_values = json::object();
  std::uint64_t budget = 300;
  double delta = kDefaultDelta;

  vqa::AnsatzSpec ansatz() const;
};

struct TrialOutcome {
  bool success = false;
  /// Gap of the most probable basis state at the final parameters.
  double gap = 0.0;
  std::uint64_t circuit_calls = 0;
  /// Circuit calls spent when a visited point first had a solving mode.
  std::optional<std::uint64_t> calls_to_solution;
};

/// One noisy optimisation in exact-loss mode. A trial succeeds when the
/// most probable basis state at the optimizer's final iterate lies within
/// the relative gap delta of the brute-force optimum.
TrialOutcome run_trial(const TrialSetup& setup, const problem::QuboMatrix& q, double epsilon, std::uint64_t seed,
                       bool track_calls = false);

using InstanceFamily = std::function<problem::QuboMatrix(std::size_t n, std::uint64_t seed)>;

/// "maxcut" (edge density), "random_qubo" (slot density) or "knapsack"
/// (capacity ratio). Throws UnknownProblemClass.
InstanceFamily instance_family(const std::string& problem_type, double density);

/// Fraction of successful trials; trial t draws a fresh instance from
/// mix_seed(seed, t), so equal seeds share instances across noise levels.
/// Calls-to-solution of successful trials are appended to `calls` if given.
double measure_success_rate(const TrialSetup& setup, const InstanceFamily& family, std::size_t n, double epsilon,
                            std::size_t trials, std::uint64_t seed, std::vector<double>* calls = nullptr);

/// Success probability of a uniformly random guess over the same instances.
double chance_success_rate(const InstanceFamily& family, std::size_t n, std::size_t trials, std::uint64_t seed,
                           double delta = kDefaultDelta);

/// Sample std of estimate_expectation over `repetitions` batches of
/// `n_shots` shots each.
double estimator_stddev(const quantum::Circuit& circuit, const problem::QuboMatrix& q, std::uint64_t n_shots,
                        std::size_t repetitions, std::uint64_t seed);

/// estimator_stddev * sqrt(n_shots) / sigma_U.
double empirical_kappa(const quantum::Circuit& circuit, const problem::QuboMatrix& q, std::uint64_t n_shots,
                       std::size_t repetitions, std::uint64_t seed);

struct KappaSettings {
  std::uint64_t n_shots = 256;
  std::size_t repetitions = 64;
  /// Probe instances per size.
  std::size_t probes = 2;
  /// Visited parameter points sampled per probe run.
  std::size_t points = 3;

  json to_json() const;
  static KappaSettings from_json(const json& doc);
};

/// Runs the VQA noise-free on each probe instance, measures kappa at points
/// spread over the optimizer's history and fits kappa(n) = a exp(b n) to the
/// per-size RMS. Raw (n, kappa) samples go to `samples` if given.
KappaFit finite_sampling_coefficient(const TrialSetup& setup, const InstanceFamily& family,
                                     const std::vector<std::size_t>& sizes, const KappaSettings& settings,
                                     std::uint64_t seed,
                                     std::vector<std::pair<double, double>>* samples = nullptr);

struct BuildPlan {
  struct Vqa {
    std::string id;        // database name, e.g. "qaoa" or "vqe"
    std::string ansatz;    // builder id
    json values = json::object();
  };
  struct Optimizer {
    std::string id;  // builder id
    json values = json::object();
  };

  std::vector<std::string> problem_types;
  std::vector<double> densities;
  std::vector<Vqa> vqas;
  std::vector<Optimizer> optimizers;
  std::size_t n_min = 3;
  std::size_t n_max = 8;
  std::vector<double> epsilons;
  std::size_t trials = 20;
  std::uint64_t budget = 300;
  double delta = kDefaultDelta;
  KappaSettings kappa;
  std::uint64_t seed = 1;

  /// Accepts "noise": {min, max, count} (log-spaced) or "epsilons": [...].
  /// Throws InvalidConfig naming the offending key.
  static BuildPlan from_json(const json& doc);
  static BuildPlan from_yaml_file(const std::filesystem::path& path);
  /// Canonical form with builder defaults filled in.
  json to_json() const;
  std::string hash() const;
  std::size_t cell_count() const;
};

struct BuildOptions {
  /// Worker threads; 0 uses the hardware concurrency.
  std::size_t threads = 0;
  /// Provenance date; empty means today (UTC).
  std::string date;
  std::function<void(const std::string&)> progress;
};

/// Runs every cell of the plan: success curves, threshold fits, the three
/// scaling fits, kappa and the calls law. Cell i uses mix_seed(plan.seed, i),
/// so any thread count yields the same database. A failing cell yields
/// invalid records with a note instead of aborting.
ScalingDatabase build_database(const BuildPlan& plan, const BuildOptions& options = {});

/// The three records of cell `index` (problem type, density, vqa, optimizer
/// in plan order, optimizer fastest).
std::vector<ScalingRecord> build_cell(const BuildPlan& plan, std::size_t index, const Provenance& provenance);

}  // namespace qdt::scalability
