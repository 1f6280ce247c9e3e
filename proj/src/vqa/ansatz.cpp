#include "qdt/vqa/ansatz.hpp"

#include <cmath>

#include "qdt/common/error.hpp"

namespace qdt::vqa {

using quantum::Gate;
using quantum::GateKind;

namespace {

const std::pair<AnsatzKind, const char*> kNames[] = {
    {AnsatzKind::HardwareEfficient, "hardware_efficient"},
    {AnsatzKind::Qaoa, "qaoa"},
    {AnsatzKind::LrQaoa, "lr_qaoa"},
    {AnsatzKind::MaQaoa, "ma_qaoa"},
    {AnsatzKind::QaoaPlus, "qaoa_plus"},
    {AnsatzKind::DcQaoa, "dc_qaoa"},
    {AnsatzKind::WsQaoa, "ws_qaoa"},
};

bool declared_only(AnsatzKind k) {
  return k != AnsatzKind::HardwareEfficient && k != AnsatzKind::Qaoa && k != AnsatzKind::LrQaoa;
}

}  // namespace

std::string to_string(AnsatzKind kind) {
  for (const auto& [k, name] : kNames)
    if (k == kind) return name;
  return "?";
}

AnsatzKind ansatz_kind_from_string(const std::string& text) {
  for (const auto& [k, name] : kNames)
    if (text == name) return k;
  fail(ErrorCode::UnknownBuilder, "unknown ansatz kind '" + text + "'");
}

std::size_t AnsatzSpec::parameter_count(std::size_t n) const {
  switch (kind) {
    case AnsatzKind::Qaoa: return 2 * depth;
    case AnsatzKind::LrQaoa: return 0;
    case AnsatzKind::HardwareEfficient: return n * depth;
    default: fail(ErrorCode::Unimplemented, "ansatz '" + to_string(kind) + "' is declared but not implemented");
  }
}

json AnsatzSpec::to_json() const {
  json out{{"kind", to_string(kind)}, {"depth", depth}};
  if (kind == AnsatzKind::LrQaoa) out["delta"] = delta;
  return out;
}

AnsatzSpec AnsatzSpec::from_json(const json& doc) {
  AnsatzSpec s;
  s.kind = ansatz_kind_from_string(doc.at("kind").get<std::string>());
  s.depth = doc.value("depth", std::size_t{1});
  s.delta = doc.value("delta", 0.7);
  return s;
}

void ParametricCircuit::bound(const Gate& g, std::size_t param, double coeff) {
  if (param >= params_) fail(ErrorCode::ParamCountMismatch, "parameter index out of range");
  gates_.push_back({g, static_cast<int>(param), coeff});
}

quantum::Circuit ParametricCircuit::bind(std::span<const double> theta) const {
  if (theta.size() != params_)
    fail(ErrorCode::ParamCountMismatch, "expected " + std::to_string(params_) + " parameters, got " +
                                            std::to_string(theta.size()));
  quantum::Circuit c(n_);
  for (const ParamGate& pg : gates_) {
    Gate g = pg.gate;
    if (pg.param >= 0) g.angle += pg.coeff * theta[static_cast<std::size_t>(pg.param)];
    c.add(g);
  }
  return c;
}

quantum::Circuit ParametricCircuit::bind_shifted(std::span<const double> theta, std::size_t gate_index,
                                                 double shift) const {
  quantum::Circuit base = bind(theta);
  quantum::Circuit c(n_);
  for (std::size_t i = 0; i < base.gates().size(); ++i) {
    Gate g = base.gates()[i];
    if (i == gate_index) g.angle += shift;
    c.add(g);
  }
  return c;
}

std::vector<double> ParametricCircuit::frequencies() const {
  std::vector<double> w(params_, 0.0);
  for (const ParamGate& pg : gates_)
    if (pg.param >= 0) {
      auto& slot = w[static_cast<std::size_t>(pg.param)];
      slot = std::max(slot, std::abs(pg.coeff));
    }
  return w;
}

std::size_t ParametricCircuit::parametric_gate_count() const {
  std::size_t c = 0;
  for (const ParamGate& pg : gates_) c += pg.param >= 0;
  return c;
}

IsingForm ising_form(const problem::QuboMatrix& q) {
  const std::size_t n = q.size();
  IsingForm f{std::vector<double>(n, 0.0), std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0))};
  for (std::size_t i = 0; i < n; ++i) {
    f.h[i] -= q.at(i, i) / 2.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = q.at(i, j);
      if (v == 0.0) continue;
      f.j[i][j] = v / 4.0;
      f.h[i] -= v / 4.0;
      f.h[j] -= v / 4.0;
    }
  }
  return f;
}

ParametricCircuit qaoa_template(const problem::QuboMatrix& q, std::size_t p) {
  if (p == 0) fail(ErrorCode::EmptySchedule, "qaoa needs at least one layer");
  const std::size_t n = q.size();
  const IsingForm ising = ising_form(q);
  ParametricCircuit pc(n, 2 * p);
  for (std::size_t i = 0; i < n; ++i) pc.fixed({GateKind::H, i, 0, 0.0});
  for (std::size_t k = 0; k < p; ++k) {
    // exp(-i gamma H_C): RZ(2 gamma h_i) and RZZ(2 gamma J_ij)
    for (std::size_t i = 0; i < n; ++i)
      if (ising.h[i] != 0.0) pc.bound({GateKind::RZ, i, 0, 0.0}, k, 2.0 * ising.h[i]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (ising.j[i][j] != 0.0) pc.bound({GateKind::RZZ, i, j, 0.0}, k, 2.0 * ising.j[i][j]);
    for (std::size_t i = 0; i < n; ++i) pc.bound({GateKind::RX, i, 0, 0.0}, p + k, 2.0);
  }
  return pc;
}

ParametricCircuit hea_template(std::size_t n, std::size_t layers) {
  if (layers == 0) fail(ErrorCode::OutOfRange, "hardware-efficient ansatz needs at least one layer");
  ParametricCircuit pc(n, n * layers);
  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t q = 0; q < n; ++q) pc.bound({GateKind::RY, q, 0, 0.0}, l * n + q, 1.0);
    for (std::size_t q = 0; q + 1 < n; ++q) pc.fixed({GateKind::CX, q, q + 1, 0.0});
  }
  return pc;
}

quantum::Circuit build_qaoa_circuit(const problem::QuboMatrix& q, const std::vector<double>& gammas,
                                    const std::vector<double>& betas) {
  if (gammas.empty() || betas.empty()) fail(ErrorCode::EmptySchedule, "qaoa schedule is empty");
  if (gammas.size() != betas.size())
    fail(ErrorCode::ParamCountMismatch, "gamma and beta schedules differ in length");
  std::vector<double> theta(gammas);
  theta.insert(theta.end(), betas.begin(), betas.end());
  return qaoa_template(q, gammas.size()).bind(theta);
}

std::pair<std::vector<double>, std::vector<double>> lr_qaoa_schedule(std::size_t p, double delta) {
  if (p == 0) fail(ErrorCode::EmptySchedule, "lr_qaoa needs p >= 1");
  if (!(delta > 0.0) || !std::isfinite(delta)) fail(ErrorCode::InvalidDelta, "delta must be positive");
  std::vector<double> gammas, betas;
  for (std::size_t k = 1; k <= p; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(p);
    gammas.push_back(t * delta);
    betas.push_back((1.0 - t) * delta);
  }
  return {gammas, betas};
}

quantum::Circuit build_hea_circuit(std::size_t n, std::size_t layers, const std::vector<double>& params) {
  if (params.size() != n * layers)
    fail(ErrorCode::ParamCountMismatch, "hardware-efficient ansatz expects " + std::to_string(n * layers) +
                                            " parameters, got " + std::to_string(params.size()));
  return hea_template(n, layers).bind(params);
}

ParametricCircuit make_template(const AnsatzSpec& spec, const problem::QuboMatrix& q) {
  if (declared_only(spec.kind))
    fail(ErrorCode::Unimplemented, "ansatz '" + to_string(spec.kind) + "' is declared but not implemented");
  switch (spec.kind) {
    case AnsatzKind::HardwareEfficient: return hea_template(q.size(), spec.depth);
    case AnsatzKind::Qaoa: return qaoa_template(q, spec.depth);
    default: break;
  }
  auto [gammas, betas] = lr_qaoa_schedule(spec.depth, spec.delta);
  quantum::Circuit c = build_qaoa_circuit(q, gammas, betas);
  ParametricCircuit pc(q.size(), 0);
  for (const Gate& g : c.gates()) pc.fixed(g);
  return pc;
}

}  // namespace qdt::vqa
