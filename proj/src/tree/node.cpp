#include "qdt/tree/node.hpp"

#include <algorithm>
#include <sstream>

#include "qdt/common/error.hpp"

namespace qdt::tree {

json NodeSpec::to_json() const {
  return json{{"name", name},
              {"type", type},
              {"requires", requires_keys},
              {"creates", creates_keys},
              {"results", result_keys},
              {"children", children},
              {"init_args", init_args},
              {"path_keys", path_keys}};
}

std::optional<json> PathSpec::lookup(const std::string& key) const {
  const json* cur = &assignments;
  std::stringstream in(key);
  for (std::string part; std::getline(in, part, '.');) {
    if (!cur->is_object()) return std::nullopt;
    auto it = cur->find(part);
    if (it == cur->end()) return std::nullopt;
    cur = &*it;
  }
  return *cur;
}

PathSpec PathSpec::from_json(const json& doc) {
  if (doc.is_null()) return {};
  if (!doc.is_object()) fail(ErrorCode::InvalidConfig, "path specification must be a map of path keys");
  return PathSpec{doc};
}

std::string Node::next_node(const ProblemData& data, RunContext& ctx) const {
  const std::string select = spec_.init_args.value("select", std::string{});
  if (select.empty()) fail(ErrorCode::NoViableChild, "node '" + name() + "' has no branching rule");
  std::optional<json> stored = data.find(select);
  std::optional<json> forced = ctx.path().lookup(select);
  if (forced && stored && *forced != *stored)
    ctx.log("path_override", json{{"node", name()}, {"key", select}, {"path", *forced}, {"stored", *stored}});
  std::optional<json> choice = forced ? forced : stored;
  if (!choice) fail(ErrorCode::NoViableChild, "node '" + name() + "': no value for '" + select + "'");
  std::string value = choice->is_string() ? choice->get<std::string>() : choice->dump();
  if (const json routes = spec_.init_args.value("routes", json::object()); routes.contains(value))
    value = routes[value].get<std::string>();
  if (std::find(spec_.children.begin(), spec_.children.end(), value) == spec_.children.end())
    fail(ErrorCode::NoViableChild, "node '" + name() + "' has no child for '" + value + "'");
  return value;
}

Delta Node::interpret_result(const ProblemData&, RunContext&) const { return {}; }

void NodeRegistry::add(const std::string& ns, const std::string& type, NodeFactory factory, std::string description) {
  auto& bucket = types_[ns];
  if (bucket.count(type)) fail(ErrorCode::DuplicateName, "node type '" + ns + "." + type + "' registered twice");
  bucket.emplace(type, Entry{std::move(factory), std::move(description)});
}

const NodeFactory* NodeRegistry::find(const std::vector<std::string>& sources, const std::string& type) const {
  for (const std::string& ns : sources) {
    auto it = types_.find(ns);
    if (it == types_.end()) continue;
    auto t = it->second.find(type);
    if (t != it->second.end()) return &t->second.factory;
  }
  return nullptr;
}

std::vector<std::string> NodeRegistry::namespaces() const {
  std::vector<std::string> out;
  for (const auto& [ns, types] : types_) out.push_back(ns);
  return out;
}

std::vector<std::string> NodeRegistry::types(const std::string& ns) const {
  std::vector<std::string> out;
  if (auto it = types_.find(ns); it != types_.end())
    for (const auto& [t, e] : it->second) out.push_back(t);
  return out;
}

}  // namespace qdt::tree
