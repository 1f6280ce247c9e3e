#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "qdt/builders/builders.hpp"
#include "qdt/nodes/basic.hpp"
#include "qdt/problem/problem.hpp"
#include "qdt/scalability/assessment.hpp"
#include "qdt/tree/tree.hpp"
#include "scaling_fixtures.hpp"

using namespace qdt;
using namespace qdt::tree;

namespace {

const std::filesystem::path kSource = QDT_SOURCE_DIR;

std::shared_ptr<const DecisionTree> basic_tree(const json& doc = nodes::basic_tree_json()) {
  return DecisionTree::build(TreeConfig::from_json(doc), nodes::standard_registry());
}

problem::ProblemInstance maxcut6() {
  return problem::parse_instance(load_json_file(kSource / "data" / "maxcut6.json"));
}

std::size_t index_of(const std::vector<std::string>& v, const std::string& s) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
}

bool contains(const std::vector<std::string>& v, const std::string& s) { return index_of(v, s) < v.size(); }

/// Writes a database to a fresh temp file and returns its path.
std::string save_db(const scalability::ScalingDatabase& db, const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "qdt_node_tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  db.save(path);
  return path.string();
}

/// MaxCut slice where VQE+SPSA is feasible at small n: epsilon* ~ 5, one shot,
/// one call. QAOA+NFT stays infeasible.
scalability::ScalingDatabase feasible_db() {
  scalability::ScalingDatabase db;
  test::add_cell(db, "maxcut", 0.5, "vqe", "spsa", 5.0, 0.01);
  test::add_cell(db, "maxcut", 0.5, "qaoa", "nft", 0.001, 2.0);
  for (auto& r : db.records) {
    if (r.vqa == "vqe") r.calls = scalability::CallsFit{1.0, 0.0, {}};
    r.benchmark.optimizer["values"] =
        builders::BuilderRegistry::global().complete_values(r.optimizer, json::object());
  }
  return db;
}

scalability::ScalingDatabase infeasible_db() {
  scalability::ScalingDatabase db;
  test::add_cell(db, "maxcut", 0.5, "vqe", "spsa", 0.001, 2.0);
  return db;
}

}  // namespace

TEST_CASE("shipped basic tree") {
  const json from_yaml = load_yaml_file(kSource / "configs" / "basic_tree.yaml");
  CHECK(TreeConfig::from_json(from_yaml).to_json() == TreeConfig::from_json(nodes::basic_tree_json()).to_json());

  const auto t = basic_tree();
  const ValidationReport& rep = t->validation();
  CHECK(rep.valid());
  CHECK(rep.paths.size() == 4);
  // converging optimizer node, reached on VQE and QAOA paths only
  bool warned = false;
  for (const auto& w : rep.warnings) warned |= w.find("select_optimizer") != std::string::npos;
  CHECK(warned);
  for (const auto& p : rep.paths) {
    if (contains(p, "classical")) CHECK(!contains(p, "select_optimizer"));
    if (contains(p, "vqe_setup") || contains(p, "qaoa_setup")) CHECK(contains(p, "select_optimizer"));
    if (contains(p, "lr_qaoa_setup")) CHECK(!contains(p, "select_optimizer"));
  }
  for (const char* key : {"algorithm", "p", "layers", "delta", "optimizer", "optimizer_params", "backend", "shots",
                          "budget", "seed", "formulation_mode"})
    CHECK(t->path_keys().count(key) == 1);
}

TEST_CASE("end to end: 6-variable MaxCut, QAOA p=2, SPSA, simulator") {
  const auto t = basic_tree();
  const auto inst = maxcut6();
  const PathSpec path = PathSpec::from_json(load_yaml_file(kSource / "configs" / "qaoa_path.yaml"));
  const RunResult r = t->run(inst, path);
  REQUIRE(r.status == "completed");
  CHECK(r.visited_path == std::vector<std::string>{"load", "encode", "assess", "select_algorithm", "qaoa_setup",
                                                   "select_optimizer", "select_backend", "run_vqa"});
  std::vector<std::string> reversed(r.visited_path.rbegin(), r.visited_path.rend());
  CHECK(r.backward_order == reversed);
  CHECK(r.prompts == 0);

  const json& res = r.result_entries;
  REQUIRE(res.contains("solution"));
  REQUIRE(res.contains("objective_report"));
  REQUIRE(res.contains("trace"));
  CHECK(res["solution"]["bitstring"].get<std::string>().size() == 6);
  CHECK(res["trace"]["ansatz"] == json{{"id", "qaoa"}, {"values", {{"p", 2}}}});
  CHECK(res["trace"]["optimizer"]["id"] == "spsa");
  CHECK(res["trace"]["n_calls"].get<std::uint64_t>() >= 1);
  CHECK(res["trace"]["circuit_calls"].get<std::uint64_t>() <= 300);

  // the reported objective is the cut of the returned bitstring
  const auto bits = problem::bits_from_string(res["solution"]["bitstring"].get<std::string>());
  CHECK(res["objective_report"]["objective_value"].get<double>() ==
        problem::evaluate_solution(inst, bits).objective_value);
  const auto f = problem::formulate_problem(inst);
  const double best_cut = -problem::brute_force_optimum(f.qubo).value;
  CHECK(res["objective_report"]["objective_value"].get<double>() <= best_cut + 1e-9);

  // the assessor had no database and said so without steering
  CHECK(r.data["recommendation"]["available"] == false);
}

TEST_CASE("mode equivalence on the basic tree") {
  const auto t = basic_tree();
  const auto inst = maxcut6();
  const RunResult automatic = t->run(inst);
  REQUIRE(automatic.status == "completed");
  CHECK(automatic.prompts == 0);

  // answers equal to each query's automatic resolution (the defaults)
  query::ScriptedAnswers script(json{{"formulation_mode", "standard"},
                                     {"algorithm", "qaoa"},
                                     {"p", 2},
                                     {"optimizer", "spsa"},
                                     {"spsa.a", automatic.data["optimizer"]["values"]["a"]},
                                     {"spsa.c", automatic.data["optimizer"]["values"]["c"]},
                                     {"spsa.max_iters", automatic.data["optimizer"]["values"]["max_iters"]},
                                     {"backend", "local_simulator"},
                                     {"shots", 1024},
                                     {"budget", 300},
                                     {"seed", 0}});
  RunOptions manual;
  manual.mode = query::Mode::Manual;
  manual.answers = &script;
  const RunResult scripted = t->run(inst, {}, manual);
  CHECK(scripted.prompts == 11);
  CHECK(scripted.to_json() == automatic.to_json());
  CHECK(scripted.to_json().dump() == automatic.to_json().dump());
}

TEST_CASE("classical and LR-QAOA branches") {
  const auto t = basic_tree();
  const auto inst = maxcut6();
  const RunResult c = t->run(inst, PathSpec::from_json(json{{"algorithm", "classical"}}));
  REQUIRE(c.status == "completed");
  CHECK(!contains(c.visited_path, "select_optimizer"));
  CHECK(!contains(c.visited_path, "run_vqa"));
  CHECK(c.data["qubo_solution"]["method"] == "brute_force");
  const double best_cut = -problem::brute_force_optimum(problem::formulate_problem(inst).qubo).value;
  CHECK(c.result_entries["objective_report"]["objective_value"].get<double>() == doctest::Approx(best_cut));
  // provenance shows only the classical child of the selector ran
  for (const auto& p : c.provenance) CHECK(p.node != "qaoa_setup");

  const RunResult lr = t->run(inst, PathSpec::from_json(json{{"algorithm", "lr_qaoa"}, {"p", 3}, {"delta", 0.5}}));
  REQUIRE(lr.status == "completed");
  CHECK(!contains(lr.visited_path, "select_optimizer"));
  CHECK(lr.data["vqa_trace"]["n_calls"] == 1);
  CHECK(!lr.result_entries["trace"].contains("optimizer"));

  const RunResult vqe = t->run(inst, PathSpec::from_json(json{{"algorithm", "vqe"}, {"layers", 1},
                                                              {"optimizer", "nft"}, {"shots", 0}, {"budget", 60}}));
  REQUIRE(vqe.status == "completed");
  CHECK(vqe.data["ansatz"] == json{{"id", "hardware_efficient"}, {"values", {{"layers", 1}}}});
  CHECK(vqe.data["vqa_trace"]["circuit_calls"].get<std::uint64_t>() <= 60);
}

TEST_CASE("knapsack solution decodes to the decision variables") {
  const auto t = basic_tree();
  const auto inst = problem::parse_instance(load_json_file(kSource / "data" / "knapsack4.json"));
  const RunResult r = t->run(inst, PathSpec::from_json(json{{"algorithm", "classical"}}));
  REQUIRE(r.status == "completed");
  CHECK(r.result_entries["solution"]["bitstring"].get<std::string>().size() == 4);
  CHECK(r.result_entries["objective_report"]["feasible"] == true);
  // best feasible packing: items 1, 2, 3 (weights 3+2+1, value 12)
  CHECK(r.result_entries["objective_report"]["objective_value"].get<double>() == 12.0);
}

TEST_CASE("optimizer registered at run time is selectable without node changes") {
  auto& reg = builders::BuilderRegistry::global();
  builders::HyperParam samples;
  samples.name = "samples";
  samples.kind = builders::ValueKind::Integer;
  samples.min = 1;
  samples.max = 1000;
  samples.default_value = 8;
  samples.description = "random probes";
  struct RandomProbe final : vqa::Optimizer {
    std::size_t samples;
    explicit RandomProbe(std::size_t s) : samples(s) {}
    std::string name() const override { return "random_probe"; }
    json settings() const override { return json{{"samples", samples}}; }
    void minimize(vqa::Objective& obj, vqa::Params x0, std::uint64_t seed) override {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(-3.14159, 3.14159);
      obj.loss(x0);
      for (std::size_t s = 0; s < samples; ++s) {
        for (double& v : x0) v = u(rng);
        obj.loss(x0);
      }
    }
  };
  reg.add_optimizer({"random_probe", "optimizer", "Random probe", {samples}}, [](const json& v) {
    return std::make_shared<RandomProbe>(v.at("samples").get<std::size_t>());
  });

  const auto t = basic_tree();
  const RunResult r = t->run(maxcut6(), PathSpec::from_json(json{{"algorithm", "qaoa"},
                                                                 {"optimizer", "random_probe"},
                                                                 {"optimizer_params", {{"samples", 5}}},
                                                                 {"shots", 0}}));
  REQUIRE(r.status == "completed");
  CHECK(r.data["optimizer"] == json{{"id", "random_probe"}, {"values", {{"samples", 5}}}});
  CHECK(r.data["vqa_trace"]["n_calls"] == 6);
}

TEST_CASE("assessor in recommendation mode steers the selection") {
  const std::string db = save_db(feasible_db(), "feasible.json");
  const auto t = basic_tree(nodes::basic_tree_json(db));
  const auto inst = problem::random_maxcut(6, 0.5, 3);
  const RunResult r = t->run(inst);
  REQUIRE(r.status == "completed");
  const json& rec = r.data["recommendation"];
  CHECK(rec["available"] == true);
  CHECK(rec["classical_fallback"] == false);
  CHECK(rec["algorithm"] == "vqe");
  // recommendation consumed downstream: route and settings follow it
  CHECK(contains(r.visited_path, "vqe_setup"));
  CHECK(r.data["algorithm"] == "vqe");
  CHECK(r.data["ansatz"] == json{{"id", "hardware_efficient"}, {"values", {{"layers", 2}}}});
  CHECK(r.data["optimizer"]["id"] == "spsa");
  CHECK(r.data["vqa_trace"]["shots_per_call"] == rec["shots"]);
  // assessment ran between encoding and selection
  std::vector<std::string> writers;
  for (const auto& p : r.provenance)
    if (p.direction == Direction::Forward) writers.push_back(p.node);
  CHECK(index_of(writers, "encode") < index_of(writers, "assess"));
  CHECK(index_of(writers, "assess") < index_of(writers, "select_algorithm"));
  CHECK(r.result_entries["assessment"]["mode"] == "recommendation");

  // a path assignment still wins over the recommendation
  const RunResult forced = t->run(inst, PathSpec::from_json(json{{"algorithm", "classical"}}));
  CHECK(contains(forced.visited_path, "classical"));

  // nothing feasible: automatic mode routes to the classical solver
  const auto t2 = basic_tree(nodes::basic_tree_json(save_db(infeasible_db(), "infeasible.json")));
  const RunResult fb = t2->run(inst);
  REQUIRE(fb.status == "completed");
  CHECK(fb.data["recommendation"]["classical_fallback"] == true);
  CHECK(fb.visited_path.back() == "classical");

  // missing class slice is reported, not fatal
  const RunResult other = t->run(problem::parse_instance(load_json_file(kSource / "data" / "knapsack4.json")));
  CHECK(other.status == "completed");
  CHECK(other.data["recommendation"]["available"] == false);

  // a configured but unreadable database is a node failure
  const auto t3 = basic_tree(nodes::basic_tree_json("/nonexistent/db.json"));
  const RunResult bad = t3->run(inst);
  CHECK(bad.status == "aborted");
  CHECK(bad.error_code == "IoFailure");
}

TEST_CASE("assessor in estimation mode annotates without routing") {
  const std::string db = save_db(feasible_db(), "estimation.json");
  // basic tree without the assessor, and the same tree with an estimating
  // assessor between optimizer and backend selection
  json plain = nodes::basic_tree_json();
  auto& nodes_json = plain["nodes"];
  nodes_json.erase(nodes_json.begin() + 2);
  nodes_json[1]["children"] = {"select_algorithm"};
  json estimating = plain;
  for (auto& n : estimating["nodes"])
    if (n["name"] == "select_optimizer") n["children"] = {"estimate"};
  estimating["nodes"].push_back(json{{"name", "estimate"},
                                     {"type", "scalability_assessor"},
                                     {"children", {"select_backend"}},
                                     {"init_args", {{"mode", "estimation"}, {"database", db}}}});

  const auto inst = problem::random_maxcut(6, 0.5, 3);
  const PathSpec path = PathSpec::from_json(json{{"algorithm", "vqe"}, {"optimizer", "spsa"}, {"shots", 0}});
  const RunResult a = basic_tree(plain)->run(inst, path);
  const RunResult b = basic_tree(estimating)->run(inst, path);
  REQUIRE(a.status == "completed");
  REQUIRE(b.status == "completed");

  std::vector<std::string> route = b.visited_path;
  route.erase(route.begin() + static_cast<long>(index_of(route, "estimate")));
  CHECK(route == a.visited_path);
  json data_b = b.data;
  REQUIRE(data_b.contains("shot_estimate"));
  CHECK(data_b["shot_estimate"]["available"] == true);
  CHECK(data_b["shot_estimate"]["entry"]["vqa"] == "vqe");
  CHECK(data_b["shot_estimate"]["entry"]["status"] == "feasible");
  data_b.erase("shot_estimate");
  data_b.erase("assessment");  // the estimator's backward-pass summary
  CHECK(data_b == a.data);
  // only the estimate key is attributed to the assessor
  for (const auto& p : b.provenance)
    if (p.node == "estimate" && p.direction == Direction::Forward)
      CHECK(p.keys == std::vector<std::string>{"shot_estimate"});

  // a combination absent from the database is annotated as unavailable
  const RunResult c = basic_tree(estimating)->run(inst, PathSpec::from_json(json{{"algorithm", "qaoa"},
                                                                                 {"optimizer", "powell"},
                                                                                 {"shots", 0}, {"budget", 40}}));
  REQUIRE(c.status == "completed");
  CHECK(c.data["shot_estimate"]["available"] == false);
}

TEST_CASE("assessor writes the output files when asked") {
  const std::string db = save_db(feasible_db(), "outputs.json");
  const auto dir = std::filesystem::temp_directory_path() / "qdt_node_outputs";
  std::filesystem::remove_all(dir);
  json doc = nodes::basic_tree_json(db);
  doc["nodes"][2]["init_args"]["output_dir"] = dir.string();
  const RunResult r = basic_tree(doc)->run(problem::random_maxcut(6, 0.5, 3),
                                           PathSpec::from_json(json{{"algorithm", "classical"}}));
  REQUIRE(r.status == "completed");
  CHECK(std::filesystem::exists(dir / scalability::kAssessmentFile));
  REQUIRE(std::filesystem::exists(dir / scalability::kRecommendedConfigFile));
  // the recommended configuration loads and validates
  const TreeDocument td = load_tree_document(dir / scalability::kRecommendedConfigFile);
  const auto t = DecisionTree::build(td.config, nodes::standard_registry());
  CHECK(t->validation().valid());
  REQUIRE(td.path);
  CHECK(td.path->assignments["algorithm"] == "vqe");
}

TEST_CASE("local search") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto q = problem::random_qubo(12, 0.5, seed);
    const auto r = nodes::local_search(q, 16, seed);
    const double opt = problem::brute_force_optimum(q).value;
    CHECK(r.value >= opt - 1e-9);
    CHECK(r.value == doctest::Approx(problem::qubo_objective(q, r.bits)));
    // a local minimum: no single flip improves
    for (std::size_t i = 0; i < q.size(); ++i) {
      auto x = r.bits;
      x[i] ^= 1U;
      CHECK(problem::qubo_objective(q, x) >= r.value - 1e-9);
    }
  }
  // deterministic per seed
  const auto q = problem::random_qubo(30, 0.3, 1);
  CHECK(nodes::local_search(q, 8, 5).bits == nodes::local_search(q, 8, 5).bits);
  CHECK(test::code_of([&] { nodes::local_search(q, 0, 1); }) == ErrorCode::OutOfRange);
}

TEST_CASE("30-variable MaxCut on the classical path needs no statevector") {
  const auto t = basic_tree();
  const RunResult r = t->run(problem::random_maxcut(30, 0.4, 11), PathSpec::from_json(json{{"algorithm", "classical"}}));
  REQUIRE(r.status == "completed");
  CHECK(r.data["qubo_solution"]["method"] == "local_search");
  CHECK(r.result_entries["solution"]["bitstring"].get<std::string>().size() == 30);
  CHECK(r.result_entries["objective_report"]["objective_value"].get<double>() > 0.0);
}
