#include "qdt/builders/builders.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdt/common/error.hpp"

namespace qdt::builders {

namespace {

std::string_view kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::Integer: return "integer";
    case ValueKind::Real: return "real";
    case ValueKind::Choice: return "choice";
  }
  return "?";
}

HyperParam integer(std::string name, double min, double max, json def, std::string description) {
  return HyperParam{std::move(name), ValueKind::Integer, min, max, false, {}, std::move(def), std::move(description)};
}

HyperParam real(std::string name, double min, double max, bool min_open, json def, std::string description) {
  return HyperParam{std::move(name), ValueKind::Real, min, max, min_open, {}, std::move(def), std::move(description)};
}

}  // namespace

void HyperParam::validate(const json& value) const {
  auto bad = [&](const std::string& why) { fail(ErrorCode::OutOfRange, "hyperparameter '" + name + "': " + why); };
  if (kind == ValueKind::Choice) {
    if (!value.is_string()) bad("expected one of the listed options");
    if (std::find(options.begin(), options.end(), value.get<std::string>()) == options.end())
      bad("'" + value.get<std::string>() + "' is not an option");
    return;
  }
  if (!value.is_number()) bad("expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) bad("must be finite");
  if (kind == ValueKind::Integer && v != std::floor(v)) bad("expected an integer");
  const bool below = min_open ? v <= min : v < min;
  if (below || v > max) {
    std::ostringstream range;
    range << (min_open ? "(" : "[") << min << ", " << max << "]";
    bad(value.dump() + " outside " + range.str());
  }
}

json HyperParam::to_json() const {
  json out{{"name", name}, {"value_kind", kind_name(kind)}, {"default", default_value}, {"description", description}};
  if (kind == ValueKind::Choice) {
    out["options"] = options;
  } else {
    out["min"] = std::isfinite(min) ? json(min) : json(nullptr);
    out["max"] = std::isfinite(max) ? json(max) : json(nullptr);
    out["min_open"] = min_open;
  }
  return out;
}

json BuilderDescriptor::to_json() const {
  json hp = json::array();
  for (const HyperParam& h : hyperparams) hp.push_back(h.to_json());
  return json{{"id", id}, {"kind", kind}, {"display_name", display_name}, {"hyperparams", hp}};
}

BuilderRegistry& BuilderRegistry::global() {
  static BuilderRegistry* registry = [] {
    auto* r = new BuilderRegistry;
    register_builtins(*r);
    return r;
  }();
  return *registry;
}

void BuilderRegistry::register_builtins(BuilderRegistry& r) {
  r.add_optimizer({"spsa", "optimizer", "SPSA",
                   {real("a", 0.0, 10.0, true, 1.0, "length of the first step (gain calibrated)"),
                    real("c", 0.0, 2.0, true, 0.1, "perturbation size numerator"),
                    integer("max_iters", 1, 1e6, 1000, "iterations (two calls each)")}},
                  [](const json& v) {
                    return vqa::make_spsa({v["a"].get<double>(), v["c"].get<double>(), v["max_iters"].get<std::size_t>()});
                  });
  r.add_optimizer({"nft", "optimizer", "NFT (sequential sinusoid fits)", {}},
                  [](const json&) { return vqa::make_nft(); });
  r.add_optimizer({"ps_gd", "optimizer", "Parameter-shift gradient descent",
                   {real("step_length", 0.0, 1.0, true, 0.1, "gradient step length"),
                    integer("max_iters", 1, 1e6, 200, "iterations")}},
                  [](const json& v) {
                    return vqa::make_ps_gd({v["step_length"].get<double>(), v["max_iters"].get<std::size_t>()});
                  });
  r.add_optimizer({"powell", "optimizer", "Powell direction set",
                   {real("initial_step", 0.0, 10.0, true, 0.5, "line-search bracket"),
                    integer("max_iters", 1, 1e6, 50, "direction-set sweeps")}},
                  [](const json& v) {
                    return vqa::make_powell({v["initial_step"].get<double>(), v["max_iters"].get<std::size_t>()});
                  });

  r.add_ansatz({"hardware_efficient", "ansatz", "Hardware-efficient ansatz (RY + CX chain)",
                {integer("layers", 1, 64, 2, "rotation/entangler layers")}},
               [](const json& v) {
                 return vqa::AnsatzSpec{vqa::AnsatzKind::HardwareEfficient, v["layers"].get<std::size_t>(), 0.7};
               });
  r.add_ansatz({"qaoa", "ansatz", "QAOA", {integer("p", 1, 64, 2, "cost/mixer layers")}},
               [](const json& v) { return vqa::AnsatzSpec{vqa::AnsatzKind::Qaoa, v["p"].get<std::size_t>(), 0.7}; });
  r.add_ansatz({"lr_qaoa", "ansatz", "Linear-ramp QAOA",
                {integer("p", 1, 256, 8, "ramp length"),
                 real("delta", 0.0, 10.0, true, 0.7, "ramp amplitude")}},
               [](const json& v) {
                 return vqa::AnsatzSpec{vqa::AnsatzKind::LrQaoa, v["p"].get<std::size_t>(), v["delta"].get<double>()};
               });
}

void BuilderRegistry::add(Entry e) {
  for (const HyperParam& h : e.descriptor.hyperparams)
    if (!h.default_value.is_null()) h.validate(h.default_value);
  std::lock_guard lock(mu_);
  if (entries_.count(e.descriptor.id))
    fail(ErrorCode::DuplicateName, "builder '" + e.descriptor.id + "' already registered");
  const std::string id = e.descriptor.id;
  entries_[id] = std::make_shared<const Entry>(std::move(e));
}

void BuilderRegistry::add_optimizer(BuilderDescriptor d, OptimizerFactory f) {
  d.kind = "optimizer";
  add({std::move(d), std::move(f), nullptr});
}

void BuilderRegistry::add_ansatz(BuilderDescriptor d, AnsatzFactory f) {
  d.kind = "ansatz";
  add({std::move(d), nullptr, std::move(f)});
}

std::vector<BuilderDescriptor> BuilderRegistry::list_builders(const std::string& kind) const {
  std::lock_guard lock(mu_);
  std::vector<BuilderDescriptor> out;
  for (const auto& [id, e] : entries_)
    if (e->descriptor.kind == kind) out.push_back(e->descriptor);
  return out;
}

const BuilderRegistry::Entry& BuilderRegistry::entry(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(id);
  if (it == entries_.end()) fail(ErrorCode::UnknownBuilder, "unknown builder '" + id + "'");
  return *it->second;
}

const BuilderDescriptor& BuilderRegistry::descriptor(const std::string& id) const { return entry(id).descriptor; }

std::vector<HyperParam> BuilderRegistry::hyperparams(const std::string& id) const {
  return entry(id).descriptor.hyperparams;
}

json BuilderRegistry::complete_values(const std::string& id, const json& values) const {
  const Entry& e = entry(id);
  if (!values.is_null() && !values.is_object())
    fail(ErrorCode::OutOfRange, "hyperparameters of '" + id + "' must be a map");
  json out = json::object();
  for (const HyperParam& h : e.descriptor.hyperparams) {
    if (values.is_object() && values.contains(h.name)) {
      h.validate(values[h.name]);
      out[h.name] = values[h.name];
    } else if (!h.default_value.is_null()) {
      out[h.name] = h.default_value;
    } else {
      fail(ErrorCode::MissingHyperParam, "builder '" + id + "' needs a value for '" + h.name + "'");
    }
  }
  if (values.is_object())
    for (const auto& [name, v] : values.items())
      if (!out.contains(name)) fail(ErrorCode::OutOfRange, "builder '" + id + "' has no hyperparameter '" + name + "'");
  return out;
}

std::shared_ptr<vqa::Optimizer> BuilderRegistry::build_optimizer(const std::string& id, const json& values) const {
  const Entry& e = entry(id);
  if (!e.optimizer) fail(ErrorCode::UnknownBuilder, "'" + id + "' is not an optimizer builder");
  return e.optimizer(complete_values(id, values));
}

vqa::AnsatzSpec BuilderRegistry::build_ansatz(const std::string& id, const json& values) const {
  const Entry& e = entry(id);
  if (!e.ansatz) fail(ErrorCode::UnknownBuilder, "'" + id + "' is not an ansatz builder");
  return e.ansatz(complete_values(id, values));
}

}  // namespace qdt::builders
