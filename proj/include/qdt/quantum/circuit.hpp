#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qdt/common/json.hpp"

namespace qdt::quantum {

enum class GateKind { H, RX, RY, RZ, CX, RZZ };

std::string_view to_string(GateKind kind);

/// One gate. Single-qubit gates use q0 only; CX is (control=q0, target=q1).
/// RZ(t) = exp(-i t Z / 2), RZZ(t) = exp(-i t Z Z / 2).
struct Gate {
  GateKind kind = GateKind::H;
  std::size_t q0 = 0;
  std::size_t q1 = 0;
  double angle = 0.0;

  bool two_qubit() const noexcept { return kind == GateKind::CX || kind == GateKind::RZZ; }
  bool parametric() const noexcept { return kind != GateKind::H && kind != GateKind::CX; }
  bool operator==(const Gate&) const = default;
};

class Circuit {
 public:
  explicit Circuit(std::size_t n_qubits = 0) : n_(n_qubits) {}

  std::size_t n_qubits() const noexcept { return n_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  bool measure_all() const noexcept { return measure_all_; }
  void set_measure_all(bool on) noexcept { measure_all_ = on; }

  Circuit& h(std::size_t q);
  Circuit& rx(std::size_t q, double theta);
  Circuit& ry(std::size_t q, double theta);
  Circuit& rz(std::size_t q, double theta);
  Circuit& cx(std::size_t control, std::size_t target);
  Circuit& rzz(std::size_t a, std::size_t b, double theta);
  /// Validates and appends.
  Circuit& add(const Gate& gate);

  std::size_t count(GateKind kind) const;
  json to_json() const;

 private:
  std::size_t n_;
  std::vector<Gate> gates_;
  bool measure_all_ = true;
};

/// OpenQASM 2 text using qelib1 gate names.
std::string to_qasm(const Circuit& circuit);

}  // namespace qdt::quantum
