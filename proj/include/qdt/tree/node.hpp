#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qdt/query/query.hpp"
#include "qdt/tree/problem_data.hpp"

namespace qdt::quantum {
class Backend;
}

namespace qdt::tree {

/// Declared data-flow contract of a node. `result_keys` are the entries the
/// node writes on the backward pass.
struct NodeSpec {
  std::string name;
  std::string type;
  std::set<std::string> requires_keys;
  std::set<std::string> creates_keys;
  std::set<std::string> result_keys;
  std::vector<std::string> children;
  json init_args = json::object();
  std::set<std::string> path_keys;

  json to_json() const;
};

/// User overrides steering the route; keys must be declared by some node.
struct PathSpec {
  json assignments = json::object();

  /// Dotted keys ("optimizer_params.a") address nested maps.
  std::optional<json> lookup(const std::string& key) const;
  static PathSpec from_json(const json& doc);
};

/// What a node may touch during a run besides ProblemData.
class RunContext {
 public:
  virtual ~RunContext() = default;

  /// Resolves a query. A path assignment under `query.path_key` wins over
  /// recommendations and defaults; otherwise the run's automation mode
  /// decides.
  virtual json ask(const query::Query& query) = 0;
  /// Path-first resolution for a chain of queries.
  virtual std::map<std::string, json> ask_tree(const query::QueryTree& tree) = 0;
  /// Forwards tree-held data such as the backend list. Throws UnknownTopic.
  virtual json request_info(const std::string& topic) const = 0;
  /// Throws UnknownBackend.
  virtual std::shared_ptr<quantum::Backend> backend(const std::string& id) const = 0;
  virtual const PathSpec& path() const = 0;
  virtual void log(const std::string& event, const json& detail) = 0;
};

/// Base of every computation node. Nodes are shared by all runs of a tree,
/// so the hooks are const and keep per-run state in ProblemData only.
class Node {
 public:
  explicit Node(NodeSpec spec) : spec_(std::move(spec)) {}
  virtual ~Node() = default;

  const NodeSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }

  /// Forward pass. Returns the entries to write; keys must be declared.
  virtual Delta execute(const ProblemData& data, RunContext& ctx) const = 0;
  /// Called on the forward pass when the node has more than one child.
  /// The default reads the path key or ProblemData entry named by the
  /// "select" init argument and maps it through the optional "routes" map.
  virtual std::string next_node(const ProblemData& data, RunContext& ctx) const;
  /// Backward pass, in reverse visit order.
  virtual Delta interpret_result(const ProblemData& data, RunContext& ctx) const;

 protected:
  NodeSpec spec_;
};

using NodeFactory = std::function<std::unique_ptr<Node>(NodeSpec spec)>;

/// Node types grouped by namespace. Tree configs name the namespaces they
/// draw from in `node_sources`.
class NodeRegistry {
 public:
  void add(const std::string& ns, const std::string& type, NodeFactory factory, std::string description = {});
  /// First match in the order of `sources`; null when absent.
  const NodeFactory* find(const std::vector<std::string>& sources, const std::string& type) const;
  std::vector<std::string> namespaces() const;
  std::vector<std::string> types(const std::string& ns) const;

 private:
  struct Entry {
    NodeFactory factory;
    std::string description;
  };
  std::map<std::string, std::map<std::string, Entry>> types_;
};

}  // namespace qdt::tree
