#include "qdt/quantum/simulator.hpp"

#include <cmath>
#include <random>

#include "qdt/common/error.hpp"

namespace qdt::quantum {

namespace {

void apply_1q(StateVector& s, std::size_t q, Amplitude m00, Amplitude m01, Amplitude m10,
              Amplitude m11) {
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i & bit) continue;
    const Amplitude a = s[i];
    const Amplitude b = s[i | bit];
    s[i] = m00 * a + m01 * b;
    s[i | bit] = m10 * a + m11 * b;
  }
}

}  // namespace

json ShotResult::to_json() const {
  json c = json::object();
  for (const auto& [idx, n] : counts) c[problem::to_string(problem::bits_from_index(idx, n_qubits))] = n;
  return json{{"n_qubits", n_qubits}, {"n_shots", n_shots}, {"counts", c}};
}

std::uint64_t ShotResult::mode() const {
  std::uint64_t best = 0, best_count = 0;
  for (const auto& [idx, n] : counts)
    if (n > best_count) {
      best = idx;
      best_count = n;
    }
  return best;
}

void apply_gate(StateVector& s, std::size_t n_qubits, const Gate& g) {
  (void)n_qubits;
  const double c = std::cos(g.angle / 2.0);
  const double sn = std::sin(g.angle / 2.0);
  const Amplitude i1{0.0, 1.0};
  switch (g.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      apply_1q(s, g.q0, r, r, r, -r);
      break;
    }
    case GateKind::RX: apply_1q(s, g.q0, c, -i1 * sn, -i1 * sn, c); break;
    case GateKind::RY: apply_1q(s, g.q0, c, -sn, sn, c); break;
    case GateKind::RZ: {
      const Amplitude lo = std::polar(1.0, -g.angle / 2.0), hi = std::polar(1.0, g.angle / 2.0);
      const std::size_t bit = std::size_t{1} << g.q0;
      for (std::size_t i = 0; i < s.size(); ++i) s[i] *= (i & bit) ? hi : lo;
      break;
    }
    case GateKind::CX: {
      const std::size_t cb = std::size_t{1} << g.q0, tb = std::size_t{1} << g.q1;
      for (std::size_t i = 0; i < s.size(); ++i)
        if ((i & cb) && !(i & tb)) std::swap(s[i], s[i | tb]);
      break;
    }
    case GateKind::RZZ: {
      const Amplitude same = std::polar(1.0, -g.angle / 2.0), diff = std::polar(1.0, g.angle / 2.0);
      const std::size_t a = std::size_t{1} << g.q0, b = std::size_t{1} << g.q1;
      for (std::size_t i = 0; i < s.size(); ++i) s[i] *= (((i & a) != 0) == ((i & b) != 0)) ? same : diff;
      break;
    }
  }
}

StateVector simulate_statevector(const Circuit& circuit, std::size_t cap) {
  const std::size_t n = circuit.n_qubits();
  if (n > cap)
    fail(ErrorCode::TooManyQubits, "statevector simulation of " + std::to_string(n) +
                                       " qubits exceeds the cap of " + std::to_string(cap));
  StateVector s(std::size_t{1} << n, Amplitude{0.0, 0.0});
  s[0] = 1.0;
  for (const Gate& g : circuit.gates()) apply_gate(s, n, g);
  return s;
}

std::vector<double> probabilities(const StateVector& state) {
  std::vector<double> p(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) p[i] = std::norm(state[i]);
  return p;
}

ShotResult sample_probabilities(const std::vector<double>& probs, std::size_t n_qubits,
                                std::uint64_t n_shots, std::uint64_t seed) {
  if (n_shots == 0) fail(ErrorCode::OutOfRange, "n_shots must be at least 1");
  ShotResult r;
  r.n_qubits = n_qubits;
  r.n_shots = n_shots;
  std::mt19937_64 rng(seed);
  double mass = 0.0;
  for (double p : probs) mass += p;
  std::uint64_t remaining = n_shots;
  // multinomial as a chain of conditional binomials
  for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
    if (probs[i] <= 0.0) continue;
    std::uint64_t k = remaining;
    const double p = mass > 0.0 ? probs[i] / mass : 1.0;
    if (p < 1.0) {
      std::binomial_distribution<std::uint64_t> draw(remaining, p);
      k = draw(rng);
    }
    mass -= probs[i];
    if (k > 0) {
      r.counts[i] = k;
      remaining -= k;
    }
  }
  if (remaining > 0) {
    // rounding residue: assign to the last state with support
    std::size_t last = probs.size() - 1;
    while (last > 0 && probs[last] <= 0.0) --last;
    r.counts[last] += remaining;
  }
  return r;
}

ShotResult sample(const Circuit& circuit, std::uint64_t n_shots, std::uint64_t seed) {
  return sample_probabilities(probabilities(simulate_statevector(circuit)), circuit.n_qubits(),
                              n_shots, seed);
}

double expectation_from_probabilities(const std::vector<double>& probs,
                                      const std::vector<double>& energies) {
  if (probs.size() != energies.size())
    fail(ErrorCode::SizeMismatch, "probability and energy tables differ in size");
  double e = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) e += probs[i] * energies[i];
  return e;
}

double exact_expectation(const Circuit& circuit, const problem::QuboMatrix& q) {
  if (circuit.n_qubits() != q.size())
    fail(ErrorCode::SizeMismatch, "circuit has " + std::to_string(circuit.n_qubits()) +
                                      " qubits but the QUBO has " + std::to_string(q.size()) +
                                      " variables");
  return expectation_from_probabilities(probabilities(simulate_statevector(circuit)),
                                        problem::qubo_energies(q));
}

double estimate_expectation(const ShotResult& shots, const problem::QuboMatrix& q) {
  if (shots.n_qubits != q.size())
    fail(ErrorCode::SizeMismatch, "shot bitstrings have length " + std::to_string(shots.n_qubits) +
                                      " but the QUBO has " + std::to_string(q.size()) + " variables");
  if (shots.n_shots == 0) fail(ErrorCode::SizeMismatch, "no shots recorded");
  double total = 0.0;
  for (const auto& [idx, n] : shots.counts)
    total += static_cast<double>(n) * problem::qubo_objective(q, problem::bits_from_index(idx, q.size()));
  return total / static_cast<double>(shots.n_shots);
}

}  // namespace qdt::quantum
