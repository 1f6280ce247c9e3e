#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qdt/problem/problem.hpp"
#include "qdt/quantum/backend.hpp"
#include "qdt/tree/node.hpp"

namespace qdt::tree {

/// Declarative tree description, usually loaded from YAML.
struct TreeConfig {
  struct NodeEntry {
    std::string name;
    std::string type;
    std::vector<std::string> children;
    json init_args = json::object();
  };

  std::vector<std::string> node_sources;
  std::vector<NodeEntry> nodes;
  std::string root;
  /// "automation": automatic | manual, "verbosity": quiet | info | debug.
  json flags = json::object();

  /// Throws InvalidConfig naming the offending key.
  static TreeConfig from_json(const json& doc);
  static TreeConfig from_yaml_file(const std::filesystem::path& path);
  json to_json() const;
};

/// A tree file, optionally bundled with a path specification under the
/// top-level keys "tree" and "path".
struct TreeDocument {
  TreeConfig config;
  std::optional<PathSpec> path;
};

TreeDocument load_tree_document(const std::filesystem::path& path);

struct Violation {
  std::string kind;  // "missing_key" | "cycle"
  std::vector<std::string> path;
  std::string node;
  std::string key;
  std::string message;

  json to_json() const;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
  /// Every root-to-final path that was checked.
  std::vector<std::vector<std::string>> paths;

  bool valid() const { return violations.empty(); }
  json to_json() const;
};

struct RunOptions {
  /// Overrides the tree's automation flag when set.
  std::optional<query::Mode> mode;
  /// Answer source for manual mode.
  query::AnswerSource* answers = nullptr;
  std::string run_id = "run";
  /// When set, a per-run JSON-lines log and the persistent log go here.
  std::optional<std::filesystem::path> log_dir;
};

struct RunResult {
  std::string status;  // "completed" | "aborted"
  std::string reason;
  std::string error_code;
  json result_entries = json::object();
  std::vector<std::string> visited_path;
  std::vector<std::string> backward_order;
  std::vector<ProvenanceEntry> provenance;
  /// Final ProblemData contents.
  json data = json::object();
  /// Queries answered by the attached source. Bookkeeping only; not part of
  /// the serialized result.
  std::size_t prompts = 0;

  json to_json() const;
};

/// An instantiated node graph. Structure is fixed after build; one tree
/// serves any number of concurrent runs.
class DecisionTree {
 public:
  static constexpr std::size_t kPathLimit = 100000;

  /// Throws UnknownNode, DuplicateName or MissingRoot. A null backend
  /// registry gets a private one holding the local simulator.
  static std::shared_ptr<const DecisionTree> build(const TreeConfig& config, const NodeRegistry& registry,
                                                   std::shared_ptr<quantum::BackendRegistry> backends = nullptr);

  const TreeConfig& config() const { return config_; }
  const std::string& root() const { return root_; }
  const Node& node(const std::string& name) const;
  std::vector<std::string> node_names() const;
  /// Union of every node's path keys.
  std::set<std::string> path_keys() const;
  query::Mode default_mode() const;
  const std::shared_ptr<quantum::BackendRegistry>& backends() const { return backends_; }

  /// Result of validate() computed at build time.
  const ValidationReport& validation() const { return report_; }
  ValidationReport validate() const;

  /// Topics: "backends", "tree".
  json request_info(const std::string& topic) const;

  /// Forward pass from the root, then interpret_result in reverse order.
  /// Throws InvalidConfig for a tree that failed validation, InvalidPathKey
  /// for undeclared path keys and UnanswerableQuery for manual mode without
  /// an answer source. Node failures abort the run instead of throwing.
  RunResult run(const problem::ProblemInstance& instance, const PathSpec& path = {},
                const RunOptions& options = {}) const;

  /// Node graph for rendering.
  json to_json() const;

 private:
  DecisionTree() = default;

  TreeConfig config_;
  std::string root_;
  std::map<std::string, std::unique_ptr<Node>> nodes_;
  std::vector<std::string> order_;  // config order
  std::shared_ptr<quantum::BackendRegistry> backends_;
  ValidationReport report_;
};

inline std::shared_ptr<const DecisionTree> build_tree(const TreeConfig& config, const NodeRegistry& registry,
                                                      std::shared_ptr<quantum::BackendRegistry> backends = nullptr) {
  return DecisionTree::build(config, registry, std::move(backends));
}

/// Registry with the local simulator registered under its default id.
std::shared_ptr<quantum::BackendRegistry> default_backends();

/// Test and scaffolding node: declares the keys listed in its init args
/// ("requires", "creates", "results", "path_keys"), writes "<node>:<key>"
/// strings, and branches on the "select" key. "fail": true makes it throw.
std::unique_ptr<Node> make_pass_through(NodeSpec spec);

/// Registers "pass_through" under the namespace "qdt.core".
void register_core_nodes(NodeRegistry& registry);

}  // namespace qdt::tree
