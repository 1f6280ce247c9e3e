#include "qdt/problem/problem.hpp"

#include <algorithm>

#include "qdt/common/error.hpp"
#include "schema.hpp"

namespace qdt::problem {

json ProblemInstance::to_json() const {
  json doc = payload;
  doc["problem_class"] = problem_class;
  if (!formulation_mode.empty()) doc["formulation_mode"] = formulation_mode;
  return doc;
}

json ObjectiveReport::to_json() const {
  return json{{"bitstring", problem::to_string(bitstring)},
              {"objective_value", objective_value},
              {"qubo_value", qubo_value},
              {"feasible", feasible}};
}

Bitstring Formulation::decode(const Bitstring& qubo_bits) const {
  if (qubo_bits.size() != qubo.size())
    fail(ErrorCode::LengthMismatch, "decode expects " + std::to_string(qubo.size()) + " bits, got " +
                                        std::to_string(qubo_bits.size()));
  return Bitstring(qubo_bits.begin(),
                   qubo_bits.begin() + static_cast<std::ptrdiff_t>(decision_variables));
}

double ProblemClass::graph_density(const json&) const {
  fail(ErrorCode::NotGraphBased, "problem class '" + name() + "' is not graph based");
}

void ProblemRegistry::add(std::shared_ptr<const ProblemClass> cls) {
  auto name = cls->name();
  classes_.erase(std::remove_if(classes_.begin(), classes_.end(),
                                [&](const auto& c) { return c->name() == name; }),
                 classes_.end());
  classes_.push_back(std::move(cls));
}

const ProblemClass* ProblemRegistry::find(std::string_view name) const {
  for (const auto& c : classes_)
    if (c->name() == name) return c.get();
  return nullptr;
}

const ProblemClass& ProblemRegistry::get(std::string_view name) const {
  const ProblemClass* cls = find(name);
  if (cls == nullptr)
    fail(ErrorCode::UnknownProblemClass, "unknown problem class '" + std::string(name) + "'");
  return *cls;
}

std::vector<std::string> ProblemRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& c : classes_) out.push_back(c->name());
  std::sort(out.begin(), out.end());
  return out;
}

const ProblemRegistry& ProblemRegistry::builtin() {
  static const ProblemRegistry registry = [] {
    ProblemRegistry r;
    r.add(make_maxcut_class());
    r.add(make_knapsack_class());
    r.add(make_random_qubo_class());
    r.add(make_qubo_class());
    return r;
  }();
  return registry;
}

ProblemInstance parse_instance(const json& doc, const ProblemRegistry& registry) {
  if (!doc.is_object()) detail::schema_error("<document>", "instance must be a JSON object");
  const json& cls_field = detail::require(doc, "problem_class");
  if (!cls_field.is_string()) detail::schema_error("problem_class", "expected a string");
  const ProblemClass& cls = registry.get(cls_field.get<std::string>());

  ProblemInstance instance;
  instance.problem_class = cls.name();
  instance.payload = cls.from_dict(doc);
  if (auto it = doc.find("formulation_mode"); it != doc.end()) {
    if (!it->is_string()) detail::schema_error("formulation_mode", "expected a string");
    auto mode = it->get<std::string>();
    auto modes = cls.modes();
    if (std::find(modes.begin(), modes.end(), mode) == modes.end())
      detail::schema_error("formulation_mode", "mode '" + mode + "' is not registered for '" +
                                                   cls.name() + "'");
    instance.formulation_mode = mode;
  }
  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) detail::schema_error("name", "expected a string");
    instance.payload["name"] = *it;
  }
  return instance;
}

ProblemInstance parse_instance(std::string_view text, const ProblemRegistry& registry) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    detail::schema_error("<document>", std::string("malformed JSON: ") + e.what());
  }
  return parse_instance(doc, registry);
}

Formulation formulate_problem(const ProblemInstance& instance, const std::string& mode,
                              const ProblemRegistry& registry) {
  const ProblemClass& cls = registry.get(instance.problem_class);
  auto modes = cls.modes();
  std::string chosen = !mode.empty() ? mode
                       : !instance.formulation_mode.empty() ? instance.formulation_mode
                                                            : modes.front();
  if (std::find(modes.begin(), modes.end(), chosen) == modes.end())
    fail(ErrorCode::UnknownMode,
         "formulation mode '" + chosen + "' is not registered for '" + cls.name() + "'");
  Formulation f = cls.formulate_problem(instance.payload, chosen);
  f.mode = chosen;
  return f;
}

ObjectiveReport evaluate_solution(const ProblemInstance& instance, const Bitstring& x,
                                  const ProblemRegistry& registry) {
  const ProblemClass& cls = registry.get(instance.problem_class);
  std::size_t n = cls.variable_count(instance.payload);
  if (x.size() != n)
    fail(ErrorCode::LengthMismatch, "bitstring has length " + std::to_string(x.size()) +
                                        ", instance has " + std::to_string(n) + " variables");
  return cls.evaluate(instance.payload, x);
}

double graph_density(const ProblemInstance& instance, const ProblemRegistry& registry) {
  return registry.get(instance.problem_class).graph_density(instance.payload);
}

std::size_t variable_count(const ProblemInstance& instance, const ProblemRegistry& registry) {
  return registry.get(instance.problem_class).variable_count(instance.payload);
}

Sense sense_of(const ProblemInstance& instance, const ProblemRegistry& registry) {
  return registry.get(instance.problem_class).sense();
}

}  // namespace qdt::problem
