#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "qdt/quantum/backend.hpp"
#include "qdt/vqa/ansatz.hpp"
#include "qdt/vqa/optimizer.hpp"

namespace qdt::vqa {

/// n_shots value selecting noise-free expectation values.
inline constexpr std::uint64_t kExactShots = 0;
/// Samples drawn at the best parameters when the loss was exact.
inline constexpr std::uint64_t kReadoutShots = 4096;

struct HistoryEntry {
  Params params;
  double loss = 0.0;
  /// Noise-free loss at the same point.
  double exact_loss = 0.0;
  /// Circuit calls spent up to and including this evaluation.
  std::uint64_t circuit_calls = 0;
};

/// `n_calls` counts loss evaluations at parameter points (= history size);
/// `circuit_calls` also counts the shifted circuits of gradient estimates.
struct VqaTrace {
  std::string status;  // "completed" | "budget_exhausted"
  std::uint64_t n_calls = 0;
  std::uint64_t circuit_calls = 0;
  std::uint64_t shots_per_call = 0;
  Params best_params;
  double best_loss = 0.0;
  problem::Bitstring best_bitstring;
  Params final_params;
  std::vector<HistoryEntry> history;

  json to_json(bool with_history = true) const;
};

struct VqaConfig {
  AnsatzSpec ansatz;
  std::shared_ptr<Optimizer> optimizer;
  /// Defaults to a private local simulator.
  std::shared_ptr<quantum::Backend> backend;
  std::uint64_t n_shots = kExactShots;
  /// Maximum circuit calls.
  std::uint64_t budget = 1000;
  std::uint64_t seed = 0;
  /// Gaussian loss noise with std epsilon * sigma_U.
  double noise_epsilon = 0.0;
  std::optional<Params> initial_params;
  /// Skip the readout sampling at the best parameters.
  bool skip_readout = false;
};

VqaTrace run_vqa(const VqaConfig& config, const problem::QuboMatrix& q);

using LossFn = std::function<double(const Params&)>;

/// Adds N(0, (epsilon * sigma_U)^2) to every evaluation; epsilon = 0 returns
/// `exact` unchanged.
LossFn inject_noise_loss(const problem::QuboMatrix& q, LossFn exact, double epsilon, std::uint64_t seed);

/// Noise-free loss of a template, evaluated on a statevector.
double exact_loss(const ParametricCircuit& pc, const problem::QuboMatrix& q, const Params& theta);

/// Generalized parameter-shift rule over a circuit-level evaluator.
Params parameter_shift_gradient(const ParametricCircuit& pc, const Params& theta,
                                const std::function<double(const quantum::Circuit&)>& evaluate);

Params initial_parameters(const AnsatzSpec& spec, std::size_t n, std::uint64_t seed);

/// (value - optimum) / |optimum|; the absolute gap when optimum is zero.
double optimality_gap(double value, double optimum);

/// Std of a single-shot loss sample under `probs`.
double shot_stddev(const std::vector<double>& probs, const std::vector<double>& energies);

}  // namespace qdt::vqa
