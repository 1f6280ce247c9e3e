#include "qdt/interfaces/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "qdt/common/error.hpp"
#include "qdt/common/json.hpp"
#include "qdt/interfaces/service.hpp"
#include "qdt/nodes/basic.hpp"
#include "qdt/problem/problem.hpp"
#include "qdt/scalability/assessment.hpp"
#include "qdt/scalability/benchmark.hpp"
#include "qdt/scalability/database.hpp"
#include "qdt/tree/tree.hpp"

namespace qdt::interfaces {

namespace fs = std::filesystem;

namespace {

/// Missing inputs get their own exit code.
struct FileNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path) {
  if (!fs::exists(path)) throw FileNotFound("file not found: " + path);
}

std::string default_database() {
  const char* env = std::getenv(nodes::kDatabaseEnv);
  return env ? env : "";
}

std::shared_ptr<const tree::DecisionTree> build_tree(const tree::TreeConfig& config) {
  return tree::DecisionTree::build(config, nodes::standard_registry());
}

int cmd_validate(const std::string& tree_path, std::ostream& out, std::ostream& err) {
  require_file(tree_path);
  const tree::TreeDocument doc = tree::load_tree_document(tree_path);
  const auto t = build_tree(doc.config);
  const tree::ValidationReport& report = t->validation();
  for (const std::string& w : report.warnings) err << "warning: " << w << "\n";
  if (!report.valid()) {
    for (const tree::Violation& v : report.violations) err << "violation: " << v.message << "\n";
    out << "invalid\n";
    return kExitFailure;
  }
  out << "valid\n";
  return kExitOk;
}

struct RunArgs {
  std::string tree;
  std::string instance;
  std::string path;
  std::string mode;
  std::string answers;
  std::string log_dir;
  std::string out;
};

int cmd_run(const RunArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
  require_file(a.tree);
  require_file(a.instance);
  if (!a.path.empty()) require_file(a.path);
  if (!a.answers.empty()) require_file(a.answers);

  const tree::TreeDocument doc = tree::load_tree_document(a.tree);
  const auto t = build_tree(doc.config);
  const problem::ProblemInstance instance = problem::parse_instance(load_json_file(a.instance));
  tree::PathSpec path = doc.path.value_or(tree::PathSpec{});
  if (!a.path.empty()) path = tree::PathSpec::from_json(load_yaml_file(a.path));

  tree::RunOptions opts;
  if (!a.mode.empty()) opts.mode = query::mode_from_string(a.mode);
  if (!a.log_dir.empty()) opts.log_dir = a.log_dir;
  std::optional<query::ScriptedAnswers> scripted;
  query::ConsoleAnswers console(in, err);
  if (!a.answers.empty()) {
    scripted.emplace(load_yaml_file(a.answers));
    opts.answers = &*scripted;
  } else {
    opts.answers = &console;
  }

  const tree::RunResult result = t->run(instance, path, opts);
  const std::string text = result.to_json().dump(2) + "\n";
  if (a.out.empty())
    out << text;
  else
    write_text_file(a.out, text);
  if (result.status != "completed") {
    err << "error: " << result.error_code << ": " << result.reason << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

struct AssessArgs {
  std::string instance;
  std::string db;
  std::string cls;
  std::string combo;
  std::string out = ".";
  std::string backend = "local_simulator";
  std::uint64_t seed = 0;
};

int cmd_assess(const AssessArgs& a, std::ostream& out) {
  require_file(a.instance);
  const std::string db_path = a.db.empty() ? default_database() : a.db;
  if (db_path.empty())
    fail(ErrorCode::InvalidConfig, std::string("no database given; pass --db or set ") + nodes::kDatabaseEnv);
  require_file(db_path);

  const scalability::ScalingDatabase db = scalability::ScalingDatabase::load(db_path);
  const problem::ProblemInstance instance = problem::parse_instance(load_json_file(a.instance));
  std::optional<std::string> cls;
  if (!a.cls.empty()) cls = a.cls;
  const scalability::ProblemCharacteristics pc = scalability::analyze_instance(instance, db, cls);

  std::optional<std::pair<std::string, std::string>> combo;
  if (!a.combo.empty()) {
    const auto comma = a.combo.find(',');
    if (comma == std::string::npos)
      fail(ErrorCode::InvalidConfig, "--combo expects 'vqa,optimizer', got '" + a.combo + "'");
    combo = std::make_pair(a.combo.substr(0, comma), a.combo.substr(comma + 1));
  }

  const scalability::Assessment assessment = scalability::assess(pc, db, combo);
  scalability::OutputOptions options;
  options.tree = nodes::basic_tree_json(fs::absolute(db_path).string());
  options.backend = a.backend;
  options.seed = a.seed;
  scalability::write_outputs(assessment, a.out, options);

  out << scalability::render_table(assessment);
  const scalability::Recommendation& r = assessment.recommendation;
  if (r.classical_fallback)
    out << "recommendation: classical (" << r.rationale << ")\n";
  else
    out << "recommendation: " << r.vqa << " + " << r.optimizer << "\n";
  out << "wrote " << (fs::path(a.out) / "scalability_assessment.json").string() << " and "
      << (fs::path(a.out) / "recommended_config.yaml").string() << "\n";
  return kExitOk;
}

struct BuildArgs {
  std::string plan;
  std::string out = "scaling_db.json";
  std::string merge;
  std::size_t threads = 0;
  std::string date;
  std::vector<std::string> problem_types;
  std::vector<double> densities;
  std::vector<std::string> vqas;
  std::vector<std::string> optimizers;
  std::vector<std::size_t> sizes;
  std::vector<double> noise;
  std::vector<double> epsilons;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> budget;
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> kappa_shots;
  std::optional<std::size_t> kappa_repetitions;
  std::optional<std::size_t> kappa_probes;
  std::optional<std::size_t> kappa_points;
};

/// Keeps the plan entries whose id is listed, in plan order.
json filter_by_id(const json& entries, const std::vector<std::string>& ids, const std::string& what) {
  json kept = json::array();
  for (const std::string& id : ids) {
    auto it = std::find_if(entries.begin(), entries.end(), [&](const json& e) { return e.value("id", "") == id; });
    kept.push_back(it != entries.end() ? *it : json{{"id", id}});
    if (it == entries.end() && what == "vqas")
      fail(ErrorCode::InvalidConfig, "vqa '" + id + "' is not defined in the plan");
  }
  return kept;
}

int cmd_build_db(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  require_file(a.plan);
  if (!a.merge.empty()) require_file(a.merge);
  json doc = load_yaml_file(a.plan);
  if (!a.problem_types.empty()) doc["problem_types"] = a.problem_types;
  if (!a.densities.empty()) doc["densities"] = a.densities;
  if (!a.vqas.empty()) doc["vqas"] = filter_by_id(doc.value("vqas", json::array()), a.vqas, "vqas");
  if (!a.optimizers.empty())
    doc["optimizers"] = filter_by_id(doc.value("optimizers", json::array()), a.optimizers, "optimizers");
  if (!a.sizes.empty()) {
    if (a.sizes.size() != 2) fail(ErrorCode::InvalidConfig, "--sizes expects MIN MAX");
    doc["sizes"] = {{"min", a.sizes[0]}, {"max", a.sizes[1]}};
  }
  if (!a.noise.empty()) {
    if (a.noise.size() != 3) fail(ErrorCode::InvalidConfig, "--noise expects MIN MAX COUNT");
    doc.erase("epsilons");
    doc["noise"] = {{"min", a.noise[0]}, {"max", a.noise[1]}, {"count", static_cast<std::size_t>(a.noise[2])}};
  }
  if (!a.epsilons.empty()) {
    doc.erase("noise");
    doc["epsilons"] = a.epsilons;
  }
  if (a.trials) doc["trials"] = *a.trials;
  if (a.budget) doc["budget"] = *a.budget;
  if (a.delta) doc["delta"] = *a.delta;
  if (a.seed) doc["seed"] = *a.seed;
  if (!doc.contains("kappa")) doc["kappa"] = json::object();
  if (a.kappa_shots) doc["kappa"]["shots"] = *a.kappa_shots;
  if (a.kappa_repetitions) doc["kappa"]["repetitions"] = *a.kappa_repetitions;
  if (a.kappa_probes) doc["kappa"]["probes"] = *a.kappa_probes;
  if (a.kappa_points) doc["kappa"]["points"] = *a.kappa_points;

  const scalability::BuildPlan plan = scalability::BuildPlan::from_json(doc);
  scalability::BuildOptions options;
  options.threads = a.threads;
  options.date = a.date;
  options.progress = [&err](const std::string& line) { err << line << "\n"; };
  scalability::ScalingDatabase built = scalability::build_database(plan, options);

  std::size_t added = built.records.size();
  if (!a.merge.empty()) {
    scalability::ScalingDatabase base = scalability::ScalingDatabase::load(a.merge);
    added = base.merge(built);
    built = std::move(base);
  }
  built.save(a.out);
  out << "wrote " << built.records.size() << " records (" << added << " new) to " << a.out << "\n";
  return kExitOk;
}

int cmd_serve(const std::string& host, int port, const std::string& tree_path, const std::string& db,
              std::ostream& out) {
  const std::string db_path = db.empty() ? default_database() : db;
  tree::TreeConfig config;
  if (tree_path.empty()) {
    config = tree::TreeConfig::from_json(db_path.empty() ? nodes::basic_tree_json() : nodes::basic_tree_json(db_path));
  } else {
    require_file(tree_path);
    config = tree::load_tree_document(tree_path).config;
  }
  const auto t = build_tree(config);
  if (!t->validation().valid()) fail(ErrorCode::InvalidConfig, "tree failed validation; run 'qdt validate'");
  ServiceOptions options;
  options.database = db_path;
  Service service(t, options);
  out << "serving on http://" << host << ":" << port << "\n" << std::flush;
  if (!service.listen(host, port)) fail(ErrorCode::IoFailure, "cannot listen on " + host + ":" + std::to_string(port));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decision-tree orchestration for QUBO problems and variational algorithms", "qdt"};
  app.require_subcommand(1);

  std::string validate_tree;
  auto* validate = app.add_subcommand("validate", "Check a tree file for missing keys and cycles");
  validate->add_option("tree", validate_tree, "Tree YAML")->required();

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a tree on a problem instance");
  run->add_option("tree", run_args.tree, "Tree YAML (may embed a path under 'path')")->required();
  run->add_option("instance", run_args.instance, "Problem instance JSON")->required();
  run->add_option("--path", run_args.path, "Path specification YAML");
  run->add_option("--mode", run_args.mode, "auto or manual")->check(CLI::IsMember({"auto", "automatic", "manual"}));
  run->add_option("--answers", run_args.answers, "Scripted answers (YAML/JSON map query id -> value)");
  run->add_option("--log-dir", run_args.log_dir, "Directory for run logs");
  run->add_option("--out", run_args.out, "Write the result JSON here instead of stdout");

  AssessArgs assess_args;
  auto* assess = app.add_subcommand("assess", "Estimate shot requirements and recommend a combination");
  assess->add_option("instance", assess_args.instance, "Problem instance JSON")->required();
  assess->add_option("--db", assess_args.db, std::string("Scaling database (default: $") + nodes::kDatabaseEnv + ")");
  assess->add_option("--class", assess_args.cls, "Database slice to use instead of the instance class");
  assess->add_option("--combo", assess_args.combo, "Estimate only this 'vqa,optimizer' pair");
  assess->add_option("--out", assess_args.out, "Output directory")->capture_default_str();
  assess->add_option("--backend", assess_args.backend, "Backend for the recommended path")->capture_default_str();
  assess->add_option("--seed", assess_args.seed, "Seed for the recommended path")->capture_default_str();

  BuildArgs build_args;
  auto* build = app.add_subcommand("build-db", "Run a benchmark sweep and write a scaling database");
  build->add_option("plan", build_args.plan, "Sweep plan YAML")->required();
  build->add_option("--out", build_args.out, "Database file")->capture_default_str();
  build->add_option("--merge", build_args.merge, "Existing database to extend");
  build->add_option("--threads", build_args.threads, "Worker threads (0: all cores)");
  build->add_option("--date", build_args.date, "Provenance date");
  build->add_option("--problem-types", build_args.problem_types, "Override problem types");
  build->add_option("--densities", build_args.densities, "Override densities");
  build->add_option("--vqas", build_args.vqas, "Keep only these plan VQA ids");
  build->add_option("--optimizers", build_args.optimizers, "Override optimizer ids");
  build->add_option("--sizes", build_args.sizes, "MIN MAX problem size")->expected(2);
  build->add_option("--noise", build_args.noise, "MIN MAX COUNT log-spaced noise levels")->expected(3);
  build->add_option("--epsilons", build_args.epsilons, "Explicit noise levels");
  build->add_option("--trials", build_args.trials, "Instances per noise level");
  build->add_option("--budget", build_args.budget, "Loss evaluations per run");
  build->add_option("--delta", build_args.delta, "Threshold success rate above chance");
  build->add_option("--seed", build_args.seed, "Sweep seed");
  build->add_option("--kappa-shots", build_args.kappa_shots, "Shots per kappa estimate");
  build->add_option("--kappa-repetitions", build_args.kappa_repetitions, "Repetitions per kappa estimate");
  build->add_option("--kappa-probes", build_args.kappa_probes, "Instances per size for kappa");
  build->add_option("--kappa-points", build_args.kappa_points, "Trajectory points per instance for kappa");

  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  std::string serve_tree;
  std::string serve_db;
  auto* serve = app.add_subcommand("serve", "Serve the JSON API");
  serve->add_option("--port", serve_port, "Port")->capture_default_str();
  serve->add_option("--host", serve_host, "Bind address")->capture_default_str();
  serve->add_option("--tree", serve_tree, "Tree YAML (default: the basic tree)");
  serve->add_option("--db", serve_db, "Scaling database for assessments");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(validate_tree, out, err);
    if (*run) return cmd_run(run_args, in, out, err);
    if (*assess) return cmd_assess(assess_args, out);
    if (*build) return cmd_build_db(build_args, out, err);
    if (*serve) return cmd_serve(serve_host, serve_port, serve_tree, serve_db, out);
  } catch (const FileNotFound& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace qdt::interfaces
