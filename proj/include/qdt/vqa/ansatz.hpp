#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdt/problem/qubo.hpp"
#include "qdt/quantum/circuit.hpp"

namespace qdt::vqa {

enum class AnsatzKind { HardwareEfficient, Qaoa, LrQaoa, MaQaoa, QaoaPlus, DcQaoa, WsQaoa };

std::string to_string(AnsatzKind kind);
AnsatzKind ansatz_kind_from_string(const std::string& text);

/// `depth` is p for the QAOA family and the layer count for the
/// hardware-efficient ansatz. `delta` only matters for lr_qaoa.
struct AnsatzSpec {
  AnsatzKind kind = AnsatzKind::Qaoa;
  std::size_t depth = 1;
  double delta = 0.7;

  /// Free parameters for an n-variable problem.
  std::size_t parameter_count(std::size_t n) const;
  json to_json() const;
  static AnsatzSpec from_json(const json& doc);
};

/// Gate whose angle is coeff * theta[param] + offset; param < 0 means fixed.
struct ParamGate {
  quantum::Gate gate;
  int param = -1;
  double coeff = 0.0;
};

class ParametricCircuit {
 public:
  ParametricCircuit(std::size_t n_qubits, std::size_t n_params) : n_(n_qubits), params_(n_params) {}

  std::size_t n_qubits() const noexcept { return n_; }
  std::size_t n_params() const noexcept { return params_; }
  const std::vector<ParamGate>& gates() const noexcept { return gates_; }

  void fixed(const quantum::Gate& g) { gates_.push_back({g, -1, 0.0}); }
  /// The gate's own angle field acts as the offset.
  void bound(const quantum::Gate& g, std::size_t param, double coeff);

  quantum::Circuit bind(std::span<const double> theta) const;
  /// Binds, then adds `shift` to the angle of gate `gate_index`.
  quantum::Circuit bind_shifted(std::span<const double> theta, std::size_t gate_index, double shift) const;

  /// Largest |coeff| among the gates driven by each parameter.
  std::vector<double> frequencies() const;
  /// Gates that depend on a parameter.
  std::size_t parametric_gate_count() const;

 private:
  std::size_t n_;
  std::size_t params_;
  std::vector<ParamGate> gates_;
};

/// Ising coefficients of x^T Q x under x = (1 - z) / 2.
struct IsingForm {
  std::vector<double> h;
  std::vector<std::vector<double>> j;  // upper triangle used
};
IsingForm ising_form(const problem::QuboMatrix& q);

/// Parameter layout: (gamma_1 .. gamma_p, beta_1 .. beta_p).
ParametricCircuit qaoa_template(const problem::QuboMatrix& q, std::size_t p);
/// Parameter layout: layer-major, qubit-minor.
ParametricCircuit hea_template(std::size_t n, std::size_t layers);

quantum::Circuit build_qaoa_circuit(const problem::QuboMatrix& q, const std::vector<double>& gammas,
                                    const std::vector<double>& betas);
std::pair<std::vector<double>, std::vector<double>> lr_qaoa_schedule(std::size_t p, double delta);
quantum::Circuit build_hea_circuit(std::size_t n, std::size_t layers, const std::vector<double>& params);

/// Template with free parameters only; lr_qaoa yields a zero-parameter
/// circuit with the schedule baked in.
ParametricCircuit make_template(const AnsatzSpec& spec, const problem::QuboMatrix& q);

}  // namespace qdt::vqa
