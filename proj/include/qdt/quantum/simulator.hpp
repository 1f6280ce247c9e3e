#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "qdt/problem/qubo.hpp"
#include "qdt/quantum/circuit.hpp"

namespace qdt::quantum {

using Amplitude = std::complex<double>;
using StateVector = std::vector<Amplitude>;

inline constexpr std::size_t kQubitCap = 20;

/// Measurement counts keyed by basis index (bit q of the index is qubit q).
struct ShotResult {
  std::size_t n_qubits = 0;
  std::uint64_t n_shots = 0;
  std::map<std::uint64_t, std::uint64_t> counts;

  /// Keys are bitstrings with qubit 0 first.
  json to_json() const;
  /// Most frequent index; ties go to the lower index.
  std::uint64_t mode() const;
};

StateVector simulate_statevector(const Circuit& circuit, std::size_t cap = kQubitCap);
void apply_gate(StateVector& state, std::size_t n_qubits, const Gate& gate);
std::vector<double> probabilities(const StateVector& state);

/// Multinomial draw over |amplitude|^2, deterministic for a given seed.
ShotResult sample(const Circuit& circuit, std::uint64_t n_shots, std::uint64_t seed);
ShotResult sample_probabilities(const std::vector<double>& probs, std::size_t n_qubits,
                                std::uint64_t n_shots, std::uint64_t seed);

double exact_expectation(const Circuit& circuit, const problem::QuboMatrix& q);
double expectation_from_probabilities(const std::vector<double>& probs,
                                      const std::vector<double>& energies);
double estimate_expectation(const ShotResult& shots, const problem::QuboMatrix& q);

}  // namespace qdt::quantum
