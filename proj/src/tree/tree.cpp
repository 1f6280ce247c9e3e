#include "qdt/tree/tree.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>

#include "qdt/common/error.hpp"

namespace qdt::tree {

namespace {

const std::set<std::string> kConfigKeys{"node_sources", "nodes", "root", "flags"};
const std::set<std::string> kNodeKeys{"name", "type", "children", "init_args"};

std::vector<std::string> string_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail(ErrorCode::InvalidConfig, where + " must be a list of names");
  std::vector<std::string> out;
  for (const json& s : v) {
    if (!s.is_string()) fail(ErrorCode::InvalidConfig, where + " must contain only strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::mutex& persistent_log_mutex() {
  static std::mutex mu;
  return mu;
}

class Run final : public RunContext {
 public:
  Run(const DecisionTree& tree, const PathSpec& path, query::Mode mode, const RunOptions& options)
      : tree_(tree), path_(path), mode_(mode), options_(options) {}

  json ask(const query::Query& q) override {
    q.check();
    if (!q.path_key.empty()) {
      if (std::optional<json> forced = path_.lookup(q.path_key)) {
        json value = q.coerce(*forced);
        if (q.recommendation && q.coerce(q.recommendation->value) != value)
          log("path_override", json{{"query", q.id}, {"path", value}, {"recommendation", q.recommendation->value}});
        log("query", json{{"query", q.id}, {"value", value}, {"source", "path"}});
        return value;
      }
    }
    json value = query::resolve(q, mode_, options_.answers);
    if (mode_ == query::Mode::Manual) ++prompts;
    log("query", json{{"query", q.id}, {"value", value}, {"source", query::to_string(mode_)}});
    return value;
  }

  std::map<std::string, json> ask_tree(const query::QueryTree& qt) override {
    return query::resolve_tree(qt, [this](const query::Query& q) { return ask(q); });
  }

  json request_info(const std::string& topic) const override { return tree_.request_info(topic); }

  std::shared_ptr<quantum::Backend> backend(const std::string& id) const override {
    return tree_.backends()->instance(id);
  }

  const PathSpec& path() const override { return path_; }

  void log(const std::string& event, const json& detail) override {
    json line{{"ts", utc_now()}, {"run", options_.run_id}, {"event", event}};
    for (const auto& [k, v] : detail.items()) line[k] = v;
    lines_.push_back(std::move(line));
  }

  void flush() const {
    if (!options_.log_dir) return;
    const auto& dir = *options_.log_dir;
    std::filesystem::create_directories(dir / "runs");
    std::ofstream run_log(dir / "runs" / (options_.run_id + ".jsonl"), std::ios::trunc);
    for (const json& l : lines_) run_log << l.dump() << "\n";
    std::lock_guard lock(persistent_log_mutex());
    std::ofstream persistent(dir / "qdt_persistent.jsonl", std::ios::app);
    for (const json& l : lines_) persistent << l.dump() << "\n";
  }

  std::size_t prompts = 0;

 private:
  const DecisionTree& tree_;
  const PathSpec& path_;
  query::Mode mode_;
  const RunOptions& options_;
  std::vector<json> lines_;
};

class PassThrough final : public Node {
 public:
  explicit PassThrough(NodeSpec spec) : Node(std::move(spec)) {
    const json& a = spec_.init_args;
    auto keys = [&](const char* field) {
      std::set<std::string> out;
      if (a.contains(field))
        for (const auto& k : string_list(a[field], spec_.name + "." + field)) out.insert(k);
      return out;
    };
    spec_.requires_keys = keys("requires");
    spec_.creates_keys = keys("creates");
    spec_.result_keys = keys("results");
    spec_.path_keys = keys("path_keys");
  }

  Delta execute(const ProblemData&, RunContext&) const override {
    if (spec_.init_args.value("fail", false)) throw std::runtime_error("injected failure");
    const json values = spec_.init_args.value("values", json::object());
    Delta out;
    for (const auto& key : spec_.creates_keys) {
      if (values.contains(key)) {
        out[key] = values[key];
      } else if (key == ProblemData::kQuboKey) {
        out[key] = json::array({json::array({0.0})});
      } else {
        out[key] = name() + ":" + key;
      }
    }
    return out;
  }

  Delta interpret_result(const ProblemData&, RunContext&) const override {
    Delta out;
    for (const auto& key : spec_.result_keys) out[key] = name() + ":" + key;
    return out;
  }
};

}  // namespace

TreeConfig TreeConfig::from_json(const json& doc) {
  if (!doc.is_object()) fail(ErrorCode::InvalidConfig, "tree configuration must be a map");
  for (const auto& [k, v] : doc.items())
    if (!kConfigKeys.count(k)) fail(ErrorCode::InvalidConfig, "unknown tree configuration key '" + k + "'");
  TreeConfig cfg;
  cfg.node_sources = doc.contains("node_sources") ? string_list(doc["node_sources"], "node_sources")
                                                  : std::vector<std::string>{"qdt.basic", "qdt.core"};
  if (!doc.contains("nodes")) fail(ErrorCode::InvalidConfig, "tree configuration needs 'nodes'");
  if (!doc["nodes"].is_array()) fail(ErrorCode::InvalidConfig, "'nodes' must be a list");
  for (const json& n : doc["nodes"]) {
    if (!n.is_object()) fail(ErrorCode::InvalidConfig, "each node entry must be a map");
    for (const auto& [k, v] : n.items())
      if (!kNodeKeys.count(k)) fail(ErrorCode::InvalidConfig, "unknown node key '" + k + "'");
    NodeEntry e;
    if (!n.contains("name") || !n["name"].is_string()) fail(ErrorCode::InvalidConfig, "node entry without a name");
    e.name = n["name"].get<std::string>();
    if (!n.contains("type") || !n["type"].is_string())
      fail(ErrorCode::InvalidConfig, "node '" + e.name + "' has no type");
    e.type = n["type"].get<std::string>();
    if (n.contains("children") && !n["children"].is_null())
      e.children = string_list(n["children"], "children of '" + e.name + "'");
    if (n.contains("init_args") && !n["init_args"].is_null()) {
      if (!n["init_args"].is_object()) fail(ErrorCode::InvalidConfig, "init_args of '" + e.name + "' must be a map");
      e.init_args = n["init_args"];
    }
    cfg.nodes.push_back(std::move(e));
  }
  if (doc.contains("root")) {
    if (!doc["root"].is_string()) fail(ErrorCode::InvalidConfig, "'root' must be a node name");
    cfg.root = doc["root"].get<std::string>();
  }
  if (doc.contains("flags") && !doc["flags"].is_null()) {
    if (!doc["flags"].is_object()) fail(ErrorCode::InvalidConfig, "'flags' must be a map");
    cfg.flags = doc["flags"];
  }
  return cfg;
}

TreeConfig TreeConfig::from_yaml_file(const std::filesystem::path& path) { return from_json(load_yaml_file(path)); }

json TreeConfig::to_json() const {
  json nodes_json = json::array();
  for (const NodeEntry& e : nodes) {
    json n{{"name", e.name}, {"type", e.type}, {"children", e.children}};
    if (!e.init_args.empty()) n["init_args"] = e.init_args;
    nodes_json.push_back(std::move(n));
  }
  return json{{"node_sources", node_sources}, {"root", root}, {"flags", flags}, {"nodes", nodes_json}};
}

TreeDocument load_tree_document(const std::filesystem::path& path) {
  json doc = load_yaml_file(path);
  TreeDocument out;
  if (doc.is_object() && doc.contains("tree")) {
    for (const auto& [k, v] : doc.items())
      if (k != "tree" && k != "path" && k != "meta")
        fail(ErrorCode::InvalidConfig, "unknown top-level key '" + k + "'");
    out.config = TreeConfig::from_json(doc["tree"]);
    if (doc.contains("path")) out.path = PathSpec::from_json(doc["path"]);
  } else {
    out.config = TreeConfig::from_json(doc);
  }
  return out;
}

json Violation::to_json() const {
  return json{{"kind", kind}, {"path", path}, {"node", node}, {"key", key}, {"message", message}};
}

json ValidationReport::to_json() const {
  json v = json::array();
  for (const Violation& x : violations) v.push_back(x.to_json());
  return json{{"valid", valid()}, {"violations", v}, {"warnings", warnings}, {"paths", paths}};
}

json RunResult::to_json() const {
  json prov = json::array();
  for (const auto& p : provenance) prov.push_back(p.to_json());
  return json{{"status", status},
              {"reason", reason},
              {"error_code", error_code},
              {"result_entries", result_entries},
              {"visited_path", visited_path},
              {"backward_order", backward_order},
              {"provenance", prov},
              {"data", data}};
}

std::shared_ptr<quantum::BackendRegistry> default_backends() {
  auto reg = std::make_shared<quantum::BackendRegistry>();
  auto sim = std::make_shared<quantum::LocalSimulator>();
  reg->register_backend(sim->record(), sim);
  return reg;
}

std::shared_ptr<const DecisionTree> DecisionTree::build(const TreeConfig& config, const NodeRegistry& registry,
                                                        std::shared_ptr<quantum::BackendRegistry> backends) {
  std::shared_ptr<DecisionTree> tree(new DecisionTree());
  tree->config_ = config;
  for (const auto& e : config.nodes) {
    if (e.name.empty()) fail(ErrorCode::InvalidConfig, "node without a name");
    if (tree->nodes_.count(e.name)) fail(ErrorCode::DuplicateName, "node name '" + e.name + "' used twice");
    const NodeFactory* factory = registry.find(config.node_sources, e.type);
    if (!factory) fail(ErrorCode::UnknownNode, "node type '" + e.type + "' (node '" + e.name + "') is not registered");
    NodeSpec spec;
    spec.name = e.name;
    spec.type = e.type;
    spec.children = e.children;
    spec.init_args = e.init_args;
    tree->nodes_.emplace(e.name, (*factory)(std::move(spec)));
    tree->order_.push_back(e.name);
  }
  for (const auto& [name, node] : tree->nodes_) {
    std::set<std::string> seen;
    for (const auto& child : node->spec().children) {
      if (!tree->nodes_.count(child))
        fail(ErrorCode::UnknownNode, "node '" + name + "' lists unknown child '" + child + "'");
      if (!seen.insert(child).second)
        fail(ErrorCode::DuplicateName, "node '" + name + "' lists child '" + child + "' twice");
    }
  }
  if (config.root.empty()) fail(ErrorCode::MissingRoot, "tree configuration names no root");
  if (!tree->nodes_.count(config.root)) fail(ErrorCode::MissingRoot, "root '" + config.root + "' is not a node");
  tree->root_ = config.root;
  tree->backends_ = backends ? std::move(backends) : default_backends();
  tree->report_ = tree->validate();
  return tree;
}

const Node& DecisionTree::node(const std::string& name) const {
  auto it = nodes_.find(name);
  if (it == nodes_.end()) fail(ErrorCode::UnknownNode, "no node named '" + name + "'");
  return *it->second;
}

std::vector<std::string> DecisionTree::node_names() const { return order_; }

std::set<std::string> DecisionTree::path_keys() const {
  std::set<std::string> out;
  for (const auto& [name, node] : nodes_) out.insert(node->spec().path_keys.begin(), node->spec().path_keys.end());
  return out;
}

query::Mode DecisionTree::default_mode() const {
  return query::mode_from_string(config_.flags.value("automation", std::string("automatic")));
}

ValidationReport DecisionTree::validate() const {
  ValidationReport report;

  // cycles anywhere in the graph
  std::map<std::string, int> color;  // 0 new, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::function<void(const std::string&)> dfs = [&](const std::string& name) {
    color[name] = 1;
    stack.push_back(name);
    for (const auto& child : nodes_.at(name)->spec().children) {
      if (color[child] == 1) {
        Violation v{"cycle", {}, child, "", ""};
        auto from = std::find(stack.begin(), stack.end(), child);
        v.path.assign(from, stack.end());
        v.path.push_back(child);
        std::string text;
        for (const auto& s : v.path) text += (text.empty() ? "" : " -> ") + s;
        v.message = "cycle: " + text;
        report.violations.push_back(std::move(v));
      } else if (color[child] == 0) {
        dfs(child);
      }
    }
    stack.pop_back();
    color[name] = 2;
  };
  dfs(root_);
  for (const auto& name : order_)
    if (color[name] == 0) dfs(name);
  if (!report.valid()) return report;

  std::map<std::string, std::set<std::string>> parents;
  std::set<std::string> reachable;
  std::vector<std::string> todo{root_};
  while (!todo.empty()) {
    std::string cur = todo.back();
    todo.pop_back();
    if (!reachable.insert(cur).second) continue;
    for (const auto& child : nodes_.at(cur)->spec().children) {
      parents[child].insert(cur);
      todo.push_back(child);
    }
  }
  for (const auto& name : order_) {
    if (!reachable.count(name)) report.warnings.push_back("node '" + name + "' is unreachable from the root");
    if (parents[name].size() > 1)
      report.warnings.push_back("node '" + name + "' has " + std::to_string(parents[name].size()) +
                                " parents; it executes at most once per run, first arrival wins");
  }

  // every root-to-final path, carrying the keys available so far
  std::vector<std::string> path;
  bool truncated = false;
  std::function<void(const std::string&, std::set<std::string>)> walk = [&](const std::string& name,
                                                                           std::set<std::string> available) {
    if (truncated) return;
    const NodeSpec& spec = nodes_.at(name)->spec();
    path.push_back(name);
    for (const auto& key : spec.requires_keys) {
      if (available.count(key)) continue;
      report.violations.push_back(
          {"missing_key", path, name, key, "'" + key + "' required by '" + name + "' is not available on this path"});
    }
    available.insert(spec.creates_keys.begin(), spec.creates_keys.end());
    if (spec.children.empty()) {
      if (report.paths.size() >= kPathLimit) {
        truncated = true;
        report.warnings.push_back("path enumeration stopped after " + std::to_string(kPathLimit) + " paths");
      } else {
        report.paths.push_back(path);
      }
    }
    for (const auto& child : spec.children) walk(child, available);
    path.pop_back();
  };
  walk(root_, {ProblemData::kInstanceKey});
  return report;
}

json DecisionTree::request_info(const std::string& topic) const {
  if (topic == "backends") {
    json out = json::array();
    for (const auto& r : backends_->list_backends()) out.push_back(r.to_json());
    return out;
  }
  if (topic == "tree") return to_json();
  fail(ErrorCode::UnknownTopic, "no information topic '" + topic + "'");
}

json DecisionTree::to_json() const {
  json nodes = json::array();
  for (const auto& name : order_) nodes.push_back(nodes_.at(name)->spec().to_json());
  return json{{"root", root_}, {"nodes", nodes}, {"flags", config_.flags}};
}

RunResult DecisionTree::run(const problem::ProblemInstance& instance, const PathSpec& path,
                            const RunOptions& options) const {
  if (!report_.valid()) fail(ErrorCode::InvalidConfig, "tree failed validation: " + report_.violations[0].message);
  const query::Mode mode = options.mode.value_or(default_mode());
  if (mode == query::Mode::Manual && !options.answers)
    fail(ErrorCode::UnanswerableQuery, "manual mode needs an answer source");
  if (!path.assignments.is_object()) fail(ErrorCode::InvalidPathKey, "path specification must be a map");
  const std::set<std::string> declared = path_keys();
  for (const auto& [key, value] : path.assignments.items())
    if (!declared.count(key)) fail(ErrorCode::InvalidPathKey, "no node declares the path key '" + key + "'");

  Run ctx(*this, path, mode, options);
  ProblemData data;
  RunResult result;
  data.inject(ProblemData::kInstanceKey, instance.to_json(), "engine");
  ctx.log("run_started", json{{"mode", query::to_string(mode)}, {"path", path.assignments}});

  auto abort = [&](const std::string& node, const std::string& code, const std::string& what) {
    result.status = "aborted";
    result.error_code = code;
    result.reason = "node '" + node + "' failed: " + what;
    ctx.log("node_failed", json{{"node", node}, {"code", code}, {"message", what}});
  };
  auto guarded = [&](const std::string& node, const std::function<void()>& step) {
    try {
      step();
      return true;
    } catch (const Error& e) {
      abort(node, std::string(to_string(e.code())), e.what());
    } catch (const std::exception& e) {
      abort(node, std::string(to_string(ErrorCode::NodeFailure)), e.what());
    }
    return false;
  };

  std::string current = root_;
  bool ok = true;
  while (ok) {
    result.visited_path.push_back(current);
    const Node& n = *nodes_.at(current);
    std::string next;
    ok = guarded(current, [&] {
      for (const auto& key : n.spec().requires_keys)
        if (!data.has(key)) fail(ErrorCode::MissingKey, "required entry '" + key + "' is missing");
      ctx.log("execute", json{{"node", current}});
      data.record_modification(current, n.execute(data, ctx), Direction::Forward, n.spec().creates_keys);
      const auto& children = n.spec().children;
      if (children.empty()) return;
      next = children.size() == 1 ? children.front() : n.next_node(data, ctx);
      if (std::find(children.begin(), children.end(), next) == children.end())
        fail(ErrorCode::NoViableChild, "next_node returned '" + next + "', which is not a child");
    });
    if (!ok || next.empty()) break;
    current = next;
  }

  if (ok) {
    for (auto it = result.visited_path.rbegin(); it != result.visited_path.rend() && ok; ++it) {
      const Node& n = *nodes_.at(*it);
      result.backward_order.push_back(*it);
      ok = guarded(*it, [&] {
        ctx.log("interpret", json{{"node", *it}});
        Delta d = n.interpret_result(data, ctx);
        data.record_modification(*it, d, Direction::Backward, n.spec().result_keys);
        for (auto& [k, v] : d) result.result_entries[k] = v;
      });
    }
  }
  if (ok) result.status = "completed";

  result.provenance = data.provenance();
  result.data = json(data.entries());
  result.prompts = ctx.prompts;
  ctx.log("run_finished", json{{"status", result.status}});
  ctx.flush();
  return result;
}

std::unique_ptr<Node> make_pass_through(NodeSpec spec) { return std::make_unique<PassThrough>(std::move(spec)); }

void register_core_nodes(NodeRegistry& registry) {
  registry.add("qdt.core", "pass_through", make_pass_through, "declares keys from init_args; for scaffolding and tests");
}

}  // namespace qdt::tree
