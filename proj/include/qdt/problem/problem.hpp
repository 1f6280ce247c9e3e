#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qdt/common/json.hpp"
#include "qdt/problem/qubo.hpp"

namespace qdt::problem {

enum class Sense { Minimize, Maximize };

/// A parsed and validated problem instance. `payload` holds the normalized
/// class-specific description (the JSON document minus the common keys).
struct ProblemInstance {
  std::string problem_class;
  json payload;
  std::string formulation_mode;  // empty: class default

  json to_json() const;
  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

struct ObjectiveReport {
  Bitstring bitstring;
  double objective_value = 0.0;
  double qubo_value = 0.0;
  bool feasible = true;

  json to_json() const;
};

/// A QUBO encoding of an instance. The first `decision_variables` QUBO
/// variables are the instance's own; any further ones are auxiliary.
/// For every feasible x: objective(x) = offset + scale * min_aux Q(x, aux).
struct Formulation {
  QuboMatrix qubo;
  std::size_t decision_variables = 0;
  double scale = 1.0;
  double offset = 0.0;
  std::string mode;

  Bitstring decode(const Bitstring& qubo_bits) const;
};

/// Template every problem class implements.
class ProblemClass {
 public:
  virtual ~ProblemClass() = default;

  virtual std::string name() const = 0;
  /// Registered formulation modes; the first one is the default.
  virtual std::vector<std::string> modes() const = 0;
  virtual Sense sense() const = 0;
  virtual bool graph_based() const { return false; }

  /// Validates the class-specific keys of `doc` and returns the normalized
  /// payload. Throws SchemaViolation naming the offending key.
  virtual json from_dict(const json& doc) const = 0;
  virtual std::size_t variable_count(const json& payload) const = 0;
  virtual Formulation formulate_problem(const json& payload, const std::string& mode) const = 0;
  /// Objective straight from the payload; never consults a QUBO for the
  /// objective value itself.
  virtual ObjectiveReport evaluate(const json& payload, const Bitstring& x) const = 0;
  virtual double graph_density(const json& payload) const;
};

/// Name -> class lookup. The default registry holds maxcut, knapsack,
/// random_qubo and qubo.
class ProblemRegistry {
 public:
  void add(std::shared_ptr<const ProblemClass> cls);
  const ProblemClass* find(std::string_view name) const;
  const ProblemClass& get(std::string_view name) const;
  std::vector<std::string> names() const;

  static const ProblemRegistry& builtin();

 private:
  std::vector<std::shared_ptr<const ProblemClass>> classes_;
};

ProblemInstance parse_instance(const json& doc, const ProblemRegistry& registry = ProblemRegistry::builtin());
ProblemInstance parse_instance(std::string_view text, const ProblemRegistry& registry = ProblemRegistry::builtin());
inline ProblemInstance parse_instance(const char* text,
                                      const ProblemRegistry& registry = ProblemRegistry::builtin()) {
  return parse_instance(std::string_view(text), registry);
}

/// Empty `mode` selects the instance's mode, then the class default.
Formulation formulate_problem(const ProblemInstance& instance, const std::string& mode = {},
                              const ProblemRegistry& registry = ProblemRegistry::builtin());

ObjectiveReport evaluate_solution(const ProblemInstance& instance, const Bitstring& x,
                                  const ProblemRegistry& registry = ProblemRegistry::builtin());

double graph_density(const ProblemInstance& instance,
                     const ProblemRegistry& registry = ProblemRegistry::builtin());

std::size_t variable_count(const ProblemInstance& instance,
                           const ProblemRegistry& registry = ProblemRegistry::builtin());

Sense sense_of(const ProblemInstance& instance,
               const ProblemRegistry& registry = ProblemRegistry::builtin());

std::shared_ptr<const ProblemClass> make_maxcut_class();
std::shared_ptr<const ProblemClass> make_knapsack_class();
std::shared_ptr<const ProblemClass> make_qubo_class();
std::shared_ptr<const ProblemClass> make_random_qubo_class();

/// Weighted graph with round(density * n(n-1)/2) edges (at least one),
/// weights uniform in (0, 1]. Used as the MaxCut benchmark family.
ProblemInstance random_maxcut(std::size_t nodes, double density, std::uint64_t seed);

/// Knapsack with integer weights 1..10, values 1..10 and capacity
/// floor(ratio * total weight).
ProblemInstance random_knapsack(std::size_t items, double capacity_ratio, std::uint64_t seed);

}  // namespace qdt::problem
