#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "qdt/vqa/ansatz.hpp"
#include "qdt/vqa/optimizer.hpp"

namespace qdt::builders {

enum class ValueKind { Integer, Real, Choice };

/// One declared input of a builder. Bounds apply to integer and real kinds;
/// `min_open` makes the lower bound exclusive.
struct HyperParam {
  std::string name;
  ValueKind kind = ValueKind::Real;
  double min = -INFINITY;
  double max = INFINITY;
  bool min_open = false;
  std::vector<std::string> options;
  json default_value;  // null when the caller must supply a value
  std::string description;

  /// Throws OutOfRange with the parameter name in the message.
  void validate(const json& value) const;
  json to_json() const;
};

struct BuilderDescriptor {
  std::string id;
  std::string kind;  // "optimizer" | "ansatz"
  std::string display_name;
  std::vector<HyperParam> hyperparams;

  json to_json() const;
};

using OptimizerFactory = std::function<std::shared_ptr<vqa::Optimizer>(const json& values)>;
using AnsatzFactory = std::function<vqa::AnsatzSpec(const json& values)>;

class BuilderRegistry {
 public:
  /// Registry preloaded with this library's optimizers and ansatzes.
  static BuilderRegistry& global();
  static void register_builtins(BuilderRegistry& registry);

  void add_optimizer(BuilderDescriptor descriptor, OptimizerFactory factory);
  void add_ansatz(BuilderDescriptor descriptor, AnsatzFactory factory);

  /// Sorted by id; unknown kinds give an empty list.
  std::vector<BuilderDescriptor> list_builders(const std::string& kind) const;
  const BuilderDescriptor& descriptor(const std::string& id) const;
  std::vector<HyperParam> hyperparams(const std::string& id) const;
  /// Fills defaults and validates every value; unknown names are rejected.
  json complete_values(const std::string& id, const json& values) const;

  std::shared_ptr<vqa::Optimizer> build_optimizer(const std::string& id, const json& values = json::object()) const;
  vqa::AnsatzSpec build_ansatz(const std::string& id, const json& values = json::object()) const;

 private:
  struct Entry {
    BuilderDescriptor descriptor;
    OptimizerFactory optimizer;
    AnsatzFactory ansatz;
  };
  const Entry& entry(const std::string& id) const;
  void add(Entry entry);

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Entry>> entries_;
};

}  // namespace qdt::builders
