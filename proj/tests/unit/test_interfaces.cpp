#include <doctest.h>

#include <httplib.h>

#include <filesystem>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "qdt/builders/builders.hpp"
#include "qdt/interfaces/cli.hpp"
#include "qdt/interfaces/service.hpp"
#include "qdt/nodes/basic.hpp"
#include "qdt/problem/problem.hpp"
#include "qdt/scalability/assessment.hpp"
#include "qdt/tree/tree.hpp"
#include "scaling_fixtures.hpp"

using namespace qdt;
using namespace qdt::interfaces;
using namespace std::chrono_literals;

namespace {

namespace fs = std::filesystem;
const fs::path kSource = QDT_SOURCE_DIR;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qdt_interface_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::shared_ptr<const tree::DecisionTree> basic_tree(const json& doc = nodes::basic_tree_json()) {
  return tree::DecisionTree::build(tree::TreeConfig::from_json(doc), nodes::standard_registry());
}

json maxcut6() { return load_json_file(kSource / "data" / "maxcut6.json"); }

/// VQE+SPSA feasible on small MaxCut; QAOA+NFT not.
std::string feasible_db(const fs::path& dir) {
  scalability::ScalingDatabase db;
  test::add_cell(db, "maxcut", 0.5, "vqe", "spsa", 5.0, 0.01);
  test::add_cell(db, "maxcut", 0.5, "qaoa", "nft", 0.001, 2.0);
  for (auto& r : db.records) {
    if (r.vqa == "vqe") r.calls = scalability::CallsFit{1.0, 0.0, {}};
    r.benchmark.optimizer["values"] = builders::BuilderRegistry::global().complete_values(r.optimizer, json::object());
  }
  const fs::path path = dir / "db.json";
  db.save(path);
  return path.string();
}

std::string state_of(Service& s, const std::string& id) {
  return s.handle("GET", "/runs/" + id, "").body["state"].get<std::string>();
}

/// Polls until the run has a pending query or is done.
json wait_for_queries(Service& s, const std::string& id) {
  for (int i = 0; i < 2000; ++i) {
    const HttpResponse r = s.handle("GET", "/runs/" + id + "/queries", "");
    if (!r.body.empty()) return r.body;
    const std::string st = state_of(s, id);
    if (st == "finished" || st == "aborted") return json::array();
    std::this_thread::sleep_for(5ms);
  }
  FAIL("no query appeared");
  return json::array();
}

/// Value automatic mode would pick: recommendation, then default, then the first option.
json auto_value(const json& query) {
  if (!query["recommendation"].is_null()) return query["recommendation"]["value"];
  if (!query["default"].is_null()) return query["default"];
  return query["options"][0];
}

}  // namespace

TEST_CASE("cli validate, usage errors and missing files") {
  auto r = cli({"validate", (kSource / "configs" / "basic_tree.yaml").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "valid\n");

  r = cli({"run", (kSource / "configs" / "basic_tree.yaml").string(), "/no/such/instance.json"});
  CHECK(r.code == 2);
  CHECK(r.err.find("file not found") != std::string::npos);

  r = cli({"validate", "/no/such/tree.yaml"});
  CHECK(r.code == 2);

  r = cli({"run", "a", "b", "--mode", "sometimes"});
  CHECK(r.code == kExitUsage);
  r = cli({"frobnicate"});
  CHECK(r.code == kExitUsage);
  r = cli({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("build-db") != std::string::npos);
}

TEST_CASE("cli run: forced QAOA path completes; undeclared key gives a one-line diagnostic") {
  const fs::path dir = scratch("run");
  auto r = cli({"run", (kSource / "configs" / "basic_tree.yaml").string(), (kSource / "data" / "maxcut6.json").string(),
                "--path", (kSource / "configs" / "qaoa_path.yaml").string()});
  REQUIRE(r.code == kExitOk);
  const json result = json::parse(r.out);
  CHECK(result["status"] == "completed");
  CHECK(result["data"]["algorithm"] == "qaoa");
  CHECK(result["result_entries"].contains("solution"));

  write_text_file(dir / "bad_path.yaml", "warp_factor: 9\n");
  r = cli({"run", (kSource / "configs" / "basic_tree.yaml").string(), (kSource / "data" / "maxcut6.json").string(),
           "--path", (dir / "bad_path.yaml").string()});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.rfind("error: InvalidPathKey: ", 0) == 0);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

  // tree document with an embedded path, result written to a file
  json doc{{"tree", nodes::basic_tree_json()}, {"path", load_yaml_file(kSource / "configs" / "qaoa_path.yaml")}};
  write_text_file(dir / "bundle.yaml", json_to_yaml(doc));
  r = cli({"run", (dir / "bundle.yaml").string(), (kSource / "data" / "maxcut6.json").string(), "--out",
           (dir / "result.json").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(load_json_file(dir / "result.json")["data"]["algorithm"] == "qaoa");
}

TEST_CASE("cli run in manual mode prompts on the console") {
  // formulation, algorithm, then the classical solver needs nothing at n=6
  auto r = cli({"run", (kSource / "configs" / "basic_tree.yaml").string(), (kSource / "data" / "maxcut6.json").string(),
                "--mode", "manual"},
               "standard\nclassical\n");
  REQUIRE(r.code == kExitOk);
  CHECK(json::parse(r.out)["data"]["algorithm"] == "classical");
  CHECK(r.err.find("formulation") != std::string::npos);
}

TEST_CASE("cli assess writes both output files and prints the table") {
  const fs::path dir = scratch("assess");
  const std::string db = feasible_db(dir);
  const json inst = problem::random_maxcut(6, 0.5, 3).to_json();
  write_text_file(dir / "inst.json", inst.dump());
  auto r = cli({"assess", (dir / "inst.json").string(), "--db", db, "--out", (dir / "out").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(fs::exists(dir / "out" / "scalability_assessment.json"));
  CHECK(fs::exists(dir / "out" / "recommended_config.yaml"));
  CHECK(r.out.find("recommendation: vqe + spsa") != std::string::npos);

  // the recommended config runs as-is and follows the recommendation
  r = cli({"run", (dir / "out" / "recommended_config.yaml").string(), (dir / "inst.json").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(json::parse(r.out)["data"]["algorithm"] == "vqe");

  r = cli({"assess", (dir / "inst.json").string(), "--db", db, "--combo", "vqe-spsa", "--out", (dir / "x").string()});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.rfind("error: InvalidConfig: ", 0) == 0);
  r = cli({"assess", (dir / "inst.json").string(), "--db", db, "--combo", "qaoa,powell", "--out", (dir / "x").string()});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.rfind("error: EmptyDatabaseSlice: ", 0) == 0);
}

TEST_CASE("cli build-db honours sweep overrides") {
  const fs::path dir = scratch("build");
  const std::string out = (dir / "db.json").string();
  auto r = cli({"build-db", (kSource / "configs" / "desk_plan.yaml").string(), "--out", out, "--problem-types",
                "maxcut", "--densities", "0.5", "--vqas", "qaoa", "--optimizers", "spsa", "--sizes", "3", "4",
                "--noise", "0.05", "2", "4", "--trials", "4", "--budget", "40", "--kappa-shots", "32",
                "--kappa-repetitions", "4", "--kappa-probes", "1", "--kappa-points", "2", "--date", "2026-01-01"});
  REQUIRE(r.code == kExitOk);
  const auto db = scalability::ScalingDatabase::load(out);
  CHECK(db.records.size() == 3);
  for (const auto& rec : db.records) {
    CHECK(rec.problem_type == "maxcut");
    CHECK(rec.vqa == "qaoa");
    CHECK(rec.optimizer == "spsa");
    CHECK(rec.provenance.date == "2026-01-01");
  }
  // merging the same sweep adds nothing
  r = cli({"build-db", (kSource / "configs" / "desk_plan.yaml").string(), "--out", out, "--merge", out,
           "--problem-types", "maxcut", "--densities", "0.5", "--vqas", "qaoa", "--optimizers", "spsa", "--sizes",
           "3", "4", "--noise", "0.05", "2", "4", "--trials", "4", "--budget", "40", "--kappa-shots", "32",
           "--kappa-repetitions", "4", "--kappa-probes", "1", "--kappa-points", "2", "--date", "2026-01-01"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("(0 new)") != std::string::npos);
}

TEST_CASE("service: tree, backends, unknown ids and malformed bodies") {
  Service s(basic_tree());
  auto r = s.handle("GET", "/tree", "");
  CHECK(r.status == 200);
  CHECK(r.body.contains("nodes"));
  r = s.handle("GET", "/backends", "");
  CHECK(r.status == 200);
  CHECK(r.body.dump().find("local_simulator") != std::string::npos);

  r = s.handle("GET", "/runs/run-999", "");
  CHECK(r.status == 404);
  CHECK(r.body["error"]["code"] == "UnknownRun");
  CHECK(!r.body["error"]["message"].get<std::string>().empty());
  r = s.handle("GET", "/runs/run-999/queries", "");
  CHECK(r.status == 404);
  r = s.handle("POST", "/queries/run-1-q0/answer", R"({"value": "vqe"})");
  CHECK(r.status == 404);
  CHECK(r.body["error"]["code"] == "UnknownQuery");
  r = s.handle("POST", "/runs", "{not json");
  CHECK(r.status == 422);
  r = s.handle("POST", "/runs", R"({"instance": {"class": "maxcut", "data": {"nodes": 2}}})");
  CHECK(r.status == 422);
  r = s.handle("GET", "/nowhere", "");
  CHECK(r.status == 404);
}

TEST_CASE("service: automatic run finishes without query traffic") {
  Service s(basic_tree());
  const auto r = s.handle("POST", "/runs", json{{"instance", maxcut6()}, {"mode", "auto"}}.dump());
  REQUIRE(r.status == 201);
  const std::string id = r.body["id"];
  CHECK(r.body["links"]["queries"] == "/runs/" + id + "/queries");
  const RunHandle h = s.runs().wait(id, 60s);
  CHECK(h.state == RunState::Finished);
  CHECK(h.result->prompts == 0);
  CHECK(s.handle("GET", "/runs/" + id + "/queries", "").body == json::array());
  const json body = s.handle("GET", "/runs/" + id, "").body;
  CHECK(body["state"] == "finished");
  CHECK(body["result"]["status"] == "completed");
}

TEST_CASE("service: manual run pauses at algorithm selection and resumes on answer") {
  Service s(basic_tree());
  const json req{{"instance", maxcut6()}, {"mode", "manual"}, {"path", {{"formulation_mode", "standard"}}}};
  const std::string id = s.handle("POST", "/runs", req.dump()).body["id"];

  json pending = wait_for_queries(s, id);
  REQUIRE(pending.size() == 1);
  const json q = pending[0];
  CHECK(q["query"]["id"] == "algorithm");
  CHECK(q["query"]["kind"] == "single_choice");
  CHECK(q["query"]["options"].size() == 4);
  CHECK(state_of(s, id) == "awaiting_query");
  const std::string qid = q["qid"];

  // validator failure leaves the query open
  auto r = s.handle("POST", "/queries/" + qid + "/answer", R"({"value": "annealing"})");
  CHECK(r.status == 422);
  CHECK(r.body["error"]["code"] == "InvalidAnswer");
  CHECK(s.handle("GET", "/runs/" + id + "/queries", "").body.size() == 1);

  r = s.handle("POST", "/queries/" + qid + "/answer", R"({"value": "vqe"})");
  CHECK(r.status == 204);
  r = s.handle("POST", "/queries/" + qid + "/answer", R"({"value": "vqe"})");
  CHECK(r.status == 409);
  CHECK(r.body["error"]["code"] == "AlreadyAnswered");

  // the run moves on: the next query is a VQE hyperparameter, not the algorithm again
  pending = wait_for_queries(s, id);
  REQUIRE(!pending.empty());
  CHECK(pending[0]["query"]["id"] == "layers");

  // answer the rest the way automatic mode would
  while (!pending.empty()) {
    for (const json& p : pending)
      CHECK(s.handle("POST", "/queries/" + p["qid"].get<std::string>() + "/answer",
                     json{{"value", auto_value(p["query"])}}.dump())
                .status == 204);
    pending = wait_for_queries(s, id);
  }
  const RunHandle h = s.runs().wait(id, 60s);
  CHECK(h.state == RunState::Finished);
  CHECK(h.result->data["algorithm"] == "vqe");
}

TEST_CASE("service: a pending query blocks only its own run") {
  Service s(basic_tree());
  const json manual{{"instance", maxcut6()}, {"mode", "manual"}, {"path", {{"formulation_mode", "standard"}}}};
  const std::string blocked = s.handle("POST", "/runs", manual.dump()).body["id"];
  REQUIRE(wait_for_queries(s, blocked).size() == 1);

  const std::string free = s.handle("POST", "/runs", json{{"instance", maxcut6()}}.dump()).body["id"];
  CHECK(s.runs().wait(free, 60s).state == RunState::Finished);
  CHECK(state_of(s, blocked) == "awaiting_query");
}

TEST_CASE("service: API and CLI give the same result for the same scripted answers") {
  const fs::path dir = scratch("parity");
  const json answers{{"formulation_mode", "standard"}, {"algorithm", "qaoa"}, {"p", 1},
                     {"optimizer", "spsa"},            {"backend", "local_simulator"},
                     {"shots", 512},                   {"budget", 120},
                     {"seed", 5},                      {"spsa.max_iters", 60},
                     {"spsa.a", 0.5},                  {"spsa.c", 0.1}};
  write_text_file(dir / "answers.json", answers.dump());

  auto c = cli({"run", (kSource / "configs" / "basic_tree.yaml").string(), (kSource / "data" / "maxcut6.json").string(),
                "--mode", "manual", "--answers", (dir / "answers.json").string()});
  REQUIRE(c.code == kExitOk);

  Service s(basic_tree());
  const json req{{"instance", maxcut6()}, {"mode", "manual"}, {"answers", answers}};
  const std::string id = s.handle("POST", "/runs", req.dump()).body["id"];
  const RunHandle h = s.runs().wait(id, 60s);
  REQUIRE(h.state == RunState::Finished);
  CHECK(h.result->to_json() == json::parse(c.out));
  CHECK(s.handle("GET", "/runs/" + id, "").body["result"] == json::parse(c.out));
}

TEST_CASE("service: runs that cannot start are aborted with a code") {
  Service s(basic_tree());
  const json req{{"instance", maxcut6()}, {"path", {{"warp_factor", 9}}}};
  const std::string id = s.handle("POST", "/runs", req.dump()).body["id"];
  const RunHandle h = s.runs().wait(id, 10s);
  CHECK(h.state == RunState::Aborted);
  CHECK(h.error_code == "InvalidPathKey");
  CHECK(s.handle("GET", "/runs/" + id, "").body["error"]["code"] == "InvalidPathKey");
}

TEST_CASE("service: finished runs expire after the retention period") {
  RunManager m(basic_tree(), 0s);
  RunRequest req;
  req.instance = maxcut6();
  const std::string first = m.submit(req);
  REQUIRE(m.wait(first, 60s).state == RunState::Finished);
  const std::string second = m.submit(req);
  CHECK(test::code_of([&] { m.handle(first); }) == ErrorCode::UnknownRun);
  CHECK(m.wait(second, 60s).state == RunState::Finished);
}

TEST_CASE("service: assessments from an instance or a raw QUBO") {
  const fs::path dir = scratch("service_assess");
  ServiceOptions opts;
  opts.database = feasible_db(dir);
  Service s(basic_tree(), opts);
  const json inst = problem::random_maxcut(6, 0.5, 3).to_json();
  auto r = s.handle("POST", "/assessments", json{{"instance", inst}}.dump());
  REQUIRE(r.status == 200);
  CHECK(r.body["recommendation"]["vqa"] == "vqe");
  CHECK(r.body["table"].get<std::string>().find("spsa") != std::string::npos);

  const json q = problem::formulate_problem(problem::parse_instance(inst)).qubo.to_json();
  r = s.handle("POST", "/assessments", json{{"qubo", q}, {"class", "maxcut"}}.dump());
  CHECK(r.status == 200);
  r = s.handle("POST", "/assessments", json{{"instance", inst}, {"combo", {"qaoa", "powell"}}}.dump());
  CHECK(r.status == 422);
  CHECK(r.body["error"]["code"] == "EmptyDatabaseSlice");

  Service no_db(basic_tree());
  CHECK(no_db.handle("POST", "/assessments", json{{"instance", inst}}.dump()).status == 422);
}

TEST_CASE("service over HTTP") {
  Service s(basic_tree());
  const int port = s.start_background();
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/backends");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "application/json");

  res = client.Post("/runs", json{{"instance", maxcut6()}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  const std::string id = json::parse(res->body)["id"];
  CHECK(s.runs().wait(id, 60s).state == RunState::Finished);
  res = client.Get("/runs/" + id);
  REQUIRE(res);
  CHECK(json::parse(res->body)["state"] == "finished");

  res = client.Post("/queries/nope/answer", R"({"value": 1})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 404);
  s.stop();
}
