#pragma once

#include <string>

#include "qdt/common/json.hpp"
#include "qdt/problem/qubo.hpp"
#include "qdt/tree/node.hpp"

namespace qdt::nodes {

/// Namespace the basic node types register under.
inline constexpr const char* kBasicNamespace = "qdt.basic";
/// Environment variable naming the default scaling database.
inline constexpr const char* kDatabaseEnv = "QDT_DATABASE";

/// Registers the basic node types under "qdt.basic":
///   instance_loader, qubo_encoder, scalability_assessor, algorithm_selector,
///   hea_setup, qaoa_setup, lr_qaoa_setup, ansatz_setup, optimizer_selector,
///   backend_selector, vqa_runner, classical_solver.
void register_basic_nodes(tree::NodeRegistry& registry);

/// Registry holding the core and basic node types.
const tree::NodeRegistry& standard_registry();

/// The shipped basic tree: load, encode, assess, then algorithm selection
/// branching into VQE, QAOA, LR-QAOA and the classical solver. The VQE and
/// QAOA branches converge at optimizer selection; LR-QAOA skips it.
json basic_tree_json();

/// Basic tree with its assessor reading `database`.
json basic_tree_json(const std::string& database);

struct LocalSearchResult {
  problem::Bitstring bits;
  double value = 0.0;
  std::uint64_t evaluations = 0;
};

/// Multi-start single-flip descent. Restart r starts from a random
/// assignment drawn from mix_seed(seed, r); the best local minimum wins,
/// ties going to the earliest restart.
LocalSearchResult local_search(const problem::QuboMatrix& q, std::size_t restarts, std::uint64_t seed);

}  // namespace qdt::nodes
