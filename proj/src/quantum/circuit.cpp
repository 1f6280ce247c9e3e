#include "qdt/quantum/circuit.hpp"

#include <cmath>
#include <sstream>

#include "qdt/common/error.hpp"

namespace qdt::quantum {

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "h";
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::CX: return "cx";
    case GateKind::RZZ: return "rzz";
  }
  return "?";
}

Circuit& Circuit::h(std::size_t q) { return add({GateKind::H, q, 0, 0.0}); }
Circuit& Circuit::rx(std::size_t q, double theta) { return add({GateKind::RX, q, 0, theta}); }
Circuit& Circuit::ry(std::size_t q, double theta) { return add({GateKind::RY, q, 0, theta}); }
Circuit& Circuit::rz(std::size_t q, double theta) { return add({GateKind::RZ, q, 0, theta}); }
Circuit& Circuit::cx(std::size_t control, std::size_t target) {
  return add({GateKind::CX, control, target, 0.0});
}
Circuit& Circuit::rzz(std::size_t a, std::size_t b, double theta) {
  return add({GateKind::RZZ, a, b, theta});
}

Circuit& Circuit::add(const Gate& gate) {
  if (gate.q0 >= n_ || (gate.two_qubit() && gate.q1 >= n_))
    fail(ErrorCode::InvalidCircuit, std::string(to_string(gate.kind)) + ": qubit index out of range");
  if (gate.two_qubit() && gate.q0 == gate.q1)
    fail(ErrorCode::InvalidCircuit, std::string(to_string(gate.kind)) + ": qubits must differ");
  if (!std::isfinite(gate.angle))
    fail(ErrorCode::InvalidCircuit, std::string(to_string(gate.kind)) + ": angle must be finite");
  gates_.push_back(gate);
  return *this;
}

std::size_t Circuit::count(GateKind kind) const {
  std::size_t c = 0;
  for (const Gate& g : gates_) c += g.kind == kind;
  return c;
}

json Circuit::to_json() const {
  json gates = json::array();
  for (const Gate& g : gates_) {
    json item{{"gate", to_string(g.kind)}, {"qubits", g.two_qubit() ? json{g.q0, g.q1} : json{g.q0}}};
    if (g.parametric()) item["angle"] = g.angle;
    gates.push_back(std::move(item));
  }
  return json{{"n_qubits", n_}, {"gates", gates}, {"measure_all", measure_all_}};
}

std::string to_qasm(const Circuit& circuit) {
  std::ostringstream out;
  out.precision(17);
  out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  out << "qreg q[" << circuit.n_qubits() << "];\n";
  if (circuit.measure_all()) out << "creg c[" << circuit.n_qubits() << "];\n";
  for (const Gate& g : circuit.gates()) {
    out << to_string(g.kind);
    if (g.parametric()) out << '(' << g.angle << ')';
    out << " q[" << g.q0 << ']';
    if (g.two_qubit()) out << ",q[" << g.q1 << ']';
    out << ";\n";
  }
  if (circuit.measure_all()) out << "measure q -> c;\n";
  return out.str();
}

}  // namespace qdt::quantum
