#include "qdt/nodes/basic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <set>

#include "qdt/builders/builders.hpp"
#include "qdt/common/error.hpp"
#include "qdt/problem/problem.hpp"
#include "qdt/scalability/assessment.hpp"
#include "qdt/tree/tree.hpp"
#include "qdt/vqa/runtime.hpp"

namespace qdt::nodes {

namespace {

using tree::Delta;
using tree::NodeSpec;
using tree::ProblemData;
using tree::RunContext;

constexpr const char* kSummaryKey = "instance_summary";
constexpr const char* kFormulationKey = "formulation";
constexpr const char* kAssessmentKey = "scalability_assessment";
constexpr const char* kRecommendationKey = "recommendation";
constexpr const char* kShotEstimateKey = "shot_estimate";
constexpr const char* kAlgorithmKey = "algorithm";
constexpr const char* kAnsatzKey = "ansatz";
constexpr const char* kOptimizerKey = "optimizer";
constexpr const char* kBackendKey = "backend";
constexpr const char* kSolutionKey = "qubo_solution";
constexpr const char* kTraceKey = "vqa_trace";

problem::ProblemInstance instance_of(const ProblemData& data) {
  return problem::parse_instance(data.get(ProblemData::kInstanceKey));
}

problem::QuboMatrix qubo_of(const ProblemData& data) {
  return problem::QuboMatrix::from_json(data.get(ProblemData::kQuboKey));
}

/// Recommendation written by an upstream assessor, if it produced one.
std::optional<json> usable_recommendation(const ProblemData& data) {
  std::optional<json> r = data.find(kRecommendationKey);
  if (!r || !r->value("available", false)) return std::nullopt;
  return r;
}

std::string algorithm_for_ansatz(const std::string& ansatz) {
  if (ansatz == "hardware_efficient") return "vqe";
  return ansatz;  // qaoa, lr_qaoa
}

json bits_json(const problem::Bitstring& bits) { return problem::to_string(bits); }

/// Query mirroring a builder hyperparameter.
query::Query hyperparam_query(const builders::HyperParam& hp, const std::string& id, const std::string& path_key) {
  query::Query q;
  q.id = id;
  q.prompt = hp.description.empty() ? hp.name : hp.name + " (" + hp.description + ")";
  q.path_key = path_key;
  q.default_value = hp.default_value;
  switch (hp.kind) {
    case builders::ValueKind::Integer:
      q.kind = query::QueryKind::Integer;
      break;
    case builders::ValueKind::Real:
      q.kind = query::QueryKind::Real;
      break;
    case builders::ValueKind::Choice:
      q.kind = query::QueryKind::SingleChoice;
      q.options = hp.options;
      break;
  }
  if (hp.kind != builders::ValueKind::Choice) {
    if (std::isfinite(hp.min)) {
      double lo = hp.min;
      if (hp.min_open) lo = hp.kind == builders::ValueKind::Integer ? hp.min + 1 : std::nextafter(hp.min, INFINITY);
      q.validator.min = lo;
    }
    if (std::isfinite(hp.max)) q.validator.max = hp.max;
  }
  return q;
}

void recommend(query::Query& q, const json& value, const std::string& rationale) {
  if (value.is_null() || !q.accepts(value)) return;
  q.recommendation = query::Recommendation{value, rationale};
}

std::set<std::string> keys(std::initializer_list<const char*> names) {
  std::set<std::string> out;
  for (const char* n : names) out.insert(n);
  return out;
}

// ---------------------------------------------------------------------------

class InstanceLoader final : public tree::Node {
 public:
  explicit InstanceLoader(NodeSpec spec) : Node(std::move(spec)) {
    spec_.requires_keys = keys({ProblemData::kInstanceKey});
    spec_.creates_keys = keys({kSummaryKey});
    spec_.result_keys = keys({"problem"});
  }

  Delta execute(const ProblemData& data, RunContext&) const override {
    const problem::ProblemInstance inst = instance_of(data);
    const auto& cls = problem::ProblemRegistry::builtin().get(inst.problem_class);
    json summary{{"problem_class", inst.problem_class},
                 {"n_variables", problem::variable_count(inst)},
                 {"sense", problem::sense_of(inst) == problem::Sense::Minimize ? "minimize" : "maximize"},
                 {"modes", cls.modes()}};
    if (cls.graph_based()) summary["graph_density"] = problem::graph_density(inst);
    return {{kSummaryKey, summary}};
  }

  Delta interpret_result(const ProblemData& data, RunContext&) const override {
    return {{"problem", data.get(kSummaryKey)}};
  }
};

class QuboEncoder final : public tree::Node {
 public:
  explicit QuboEncoder(NodeSpec spec) : Node(std::move(spec)) {
    spec_.requires_keys = keys({ProblemData::kInstanceKey});
    spec_.creates_keys = keys({ProblemData::kQuboKey, kFormulationKey});
    spec_.result_keys = keys({"solution", "objective_report"});
    spec_.path_keys = keys({"formulation_mode"});
  }

  Delta execute(const ProblemData& data, RunContext& ctx) const override {
    const problem::ProblemInstance inst = instance_of(data);
    const auto& cls = problem::ProblemRegistry::builtin().get(inst.problem_class);
    query::Query q;
    q.id = "formulation_mode";
    q.kind = query::QueryKind::SingleChoice;
    q.prompt = "QUBO formulation mode";
    q.options = cls.modes();
    q.default_value = inst.formulation_mode.empty() ? q.options.front() : inst.formulation_mode;
    q.path_key = "formulation_mode";
    const std::string mode = ctx.ask(q).get<std::string>();
    const problem::Formulation f = problem::formulate_problem(inst, mode);
    return {{ProblemData::kQuboKey, f.qubo.to_json()},
            {kFormulationKey,
             json{{"mode", f.mode},
                  {"n_qubo", f.qubo.size()},
                  {"decision_variables", f.decision_variables},
                  {"scale", f.scale},
                  {"offset", f.offset},
                  {"qubo_density", problem::qubo_density(f.qubo)}}}};
  }

  // Maps the solver's QUBO assignment back to the problem's own variables.
  Delta interpret_result(const ProblemData& data, RunContext&) const override {
    std::optional<json> sol = data.find(kSolutionKey);
    if (!sol) return {};
    const problem::ProblemInstance inst = instance_of(data);
    const problem::Formulation f =
        problem::formulate_problem(inst, data.get(kFormulationKey).at("mode").get<std::string>());
    const problem::Bitstring qbits = problem::bits_from_string(sol->at("bitstring").get<std::string>());
    const problem::Bitstring x = f.decode(qbits);
    return {{"solution", json{{"bitstring", bits_json(x)}, {"qubo_bitstring", bits_json(qbits)}}},
            {"objective_report", problem::evaluate_solution(inst, x).to_json()}};
  }
};

class ScalabilityAssessor final : public tree::Node {
 public:
  explicit ScalabilityAssessor(NodeSpec spec) : Node(std::move(spec)) {
    mode_ = spec_.init_args.value("mode", std::string("recommendation"));
    if (mode_ != "recommendation" && mode_ != "estimation")
      fail(ErrorCode::InvalidConfig, "assessor '" + spec_.name + "': mode must be recommendation or estimation");
    spec_.requires_keys = keys({ProblemData::kInstanceKey, ProblemData::kQuboKey});
    if (mode_ == "recommendation") {
      spec_.creates_keys = keys({kAssessmentKey, kRecommendationKey});
    } else {
      spec_.requires_keys.insert(kAnsatzKey);
      spec_.creates_keys = keys({kShotEstimateKey});
    }
    spec_.result_keys = keys({"assessment"});
  }

  Delta execute(const ProblemData& data, RunContext& ctx) const override {
    std::string path = spec_.init_args.value("database", std::string{});
    if (path.empty())
      if (const char* env = std::getenv(kDatabaseEnv)) path = env;
    if (path.empty()) return unavailable("no scaling database configured");
    const scalability::ScalingDatabase db = scalability::ScalingDatabase::load(path);

    const problem::ProblemInstance inst = instance_of(data);
    std::optional<std::string> cls;
    if (spec_.init_args.contains("class")) cls = spec_.init_args["class"].get<std::string>();
    scalability::ProblemCharacteristics pc;
    try {
      pc = scalability::analyze_instance(inst, db, cls);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyDatabaseSlice) throw;
      return unavailable(e.what());
    }
    scalability::Assessment a = scalability::assess(pc, db);
    ctx.log("assessment", json{{"node", name()}, {"recommendation", a.recommendation.to_json()}});
    return mode_ == "recommendation" ? recommendation(a, path) : estimation(a, data);
  }

  Delta interpret_result(const ProblemData& data, RunContext&) const override {
    json out{{"mode", mode_}};
    if (mode_ == "recommendation") {
      out["recommendation"] = data.get(kRecommendationKey);
    } else {
      out["estimate"] = data.get(kShotEstimateKey);
    }
    return {{"assessment", out}};
  }

 private:
  Delta unavailable(const std::string& reason) const {
    const json note{{"available", false}, {"reason", reason}};
    if (mode_ == "recommendation") return {{kAssessmentKey, note}, {kRecommendationKey, note}};
    return {{kShotEstimateKey, note}};
  }

  Delta recommendation(scalability::Assessment& a, const std::string& db_path) const {
    a.mode = "recommendation";
    if (spec_.init_args.contains("output_dir")) {
      scalability::OutputOptions opts;
      opts.tree = basic_tree_json(db_path);
      opts.backend = spec_.init_args.value("backend", std::string("local_simulator"));
      scalability::write_outputs(a, spec_.init_args["output_dir"].get<std::string>(), opts);
    }
    const scalability::Recommendation& r = a.recommendation;
    json rec{{"available", true}, {"classical_fallback", r.classical_fallback}, {"rationale", r.rationale}};
    if (r.classical_fallback) {
      rec["algorithm"] = "classical";
    } else {
      const scalability::CombinationEntry& e = *a.find(r.vqa, r.optimizer);
      rec["algorithm"] = algorithm_for_ansatz(e.benchmark.ansatz.at("id").get<std::string>());
      rec["ansatz"] = e.benchmark.ansatz;
      rec["optimizer"] = e.benchmark.optimizer;
      rec["shots"] = static_cast<std::uint64_t>(*e.worst_case);
      rec["budget"] = e.benchmark.budget;
    }
    return {{kAssessmentKey, a.to_json()}, {kRecommendationKey, rec}};
  }

  // Annotates the already selected combination; never steers the route.
  Delta estimation(scalability::Assessment& a, const ProblemData& data) const {
    a.mode = "estimation";
    const json ansatz = data.get(kAnsatzKey);
    const std::optional<json> optimizer = data.find(kOptimizerKey);
    for (const auto& e : a.entries) {
      if (e.benchmark.ansatz.value("id", std::string{}) != ansatz.at("id")) continue;
      if (optimizer && e.benchmark.optimizer.value("id", std::string{}) != optimizer->at("id")) continue;
      const bool same = e.benchmark.ansatz.value("values", json::object()) == ansatz.at("values") &&
                        (!optimizer || e.benchmark.optimizer.value("values", json::object()) ==
                                           optimizer->value("values", json::object()));
      return {{kShotEstimateKey, json{{"available", true},
                                      {"problem", a.problem.to_json()},
                                      {"boundary", a.boundary},
                                      {"entry", e.to_json()},
                                      {"benchmark_settings_match", same}}}};
    }
    return unavailable("selected combination is not in the database slice");
  }

  std::string mode_;
};

class AlgorithmSelector final : public tree::Node {
 public:
  explicit AlgorithmSelector(NodeSpec spec) : Node(std::move(spec)) {
    spec_.requires_keys = keys({ProblemData::kQuboKey});
    spec_.creates_keys = keys({kAlgorithmKey});
    spec_.path_keys = keys({kAlgorithmKey});
    if (!spec_.init_args.contains("select")) spec_.init_args["select"] = kAlgorithmKey;
  }

  Delta execute(const ProblemData& data, RunContext& ctx) const override {
    query::Query q;
    q.id = kAlgorithmKey;
    q.kind = query::QueryKind::SingleChoice;
    q.prompt = "Algorithm";
    q.path_key = kAlgorithmKey;
    const json routes = spec_.init_args.value("routes", json::object());
    for (const auto& [option, child] : routes.items()) q.options.push_back(option);
    if (q.options.empty()) q.options = spec_.children;
    q.default_value = spec_.init_args.value("default", q.options.front());
    if (auto r = usable_recommendation(data)) recommend(q, r->at("algorithm"), r->value("rationale", ""));
    return {{kAlgorithmKey, ctx.ask(q)}};
  }
};

/// Queries the hyperparameters of one ansatz builder.
class AnsatzSetup final : public tree::Node {
 public:
  AnsatzSetup(NodeSpec spec, std::string builder) : Node(std::move(spec)), builder_(std::move(builder)) {
    if (builder_.empty()) builder_ = spec_.init_args.value("builder", std::string{});
    if (builder_.empty()) fail(ErrorCode::InvalidConfig, "ansatz setup '" + spec_.name + "' names no builder");
    spec_.creates_keys = keys({kAnsatzKey});
    for (const auto& hp : builders::BuilderRegistry::global().hyperparams(builder_)) spec_.path_keys.insert(hp.name);
  }

  Delta execute(const ProblemData& data, RunContext& ctx) const override {
    const auto& reg = builders::BuilderRegistry::global();
    std::optional<json> rec = usable_recommendation(data);
    if (rec && (!rec->contains("ansatz") || rec->at("ansatz").value("id", std::string{}) != builder_))
      rec.reset();
    json values = json::object();
    for (const auto& hp : reg.hyperparams(builder_)) {
      query::Query q = hyperparam_query(hp, hp.name, hp.name);
      if (rec) recommend(q, rec->at("ansatz").at("values").value(hp.name, json()), rec->value("rationale", ""));
      values[hp.name] = ctx.ask(q);
    }
    values = reg.complete_values(builder_, values);
    reg.build_ansatz(builder_, values);  // fail here rather than in the runner
    return {{kAnsatzKey, json{{"id", builder_}, {"values", values}}}};
  }

 private:
  std::string builder_;
};

class OptimizerSelector final : public tree::Node {
 public:
  explicit OptimizerSelector(NodeSpec spec) : Node(std::move(spec)) {
    spec_.requires_keys = keys({kAnsatzKey});
    spec_.creates_keys = keys({kOptimizerKey});
    spec_.path_keys = keys({kOptimizerKey, "optimizer_params"});
  }

  Delta execute(const ProblemData& data, RunContext& ctx) const override {
    const auto& reg = builders::BuilderRegistry::global();
    // listed at run time so newly registered builders appear without changes here
    const auto descriptors = reg.list_builders("optimizer");
    std::optional<json> rec = usable_recommendation(data);
    if (rec && !rec->contains("optimizer")) rec.reset();

    query::Query root;
    root.id = kOptimizerKey;
    root.kind = query::QueryKind::SingleChoice;
    root.prompt = "Classical optimizer";
    root.path_key = kOptimizerKey;
    for (const auto& d : descriptors) root.options.push_back(d.id);
    const std::string fallback = spec_.init_args.value("default", std::string("spsa"));
    root.default_value = std::find(root.options.begin(), root.options.end(), fallback) != root.options.end()
                             ? fallback
                             : root.options.front();
    if (rec) recommend(root, rec->at("optimizer").at("id"), rec->value("rationale", ""));

    query::QueryTree qt(root);
    for (const auto& d : descriptors) {
      const json rec_values = rec && rec->at("optimizer").at("id") == d.id
                                  ? rec->at("optimizer").value("values", json::object())
                                  : json::object();
      for (const auto& hp : d.hyperparams) {
        query::Query q = hyperparam_query(hp, d.id + "." + hp.name, "optimizer_params." + hp.name);
        if (rec_values.contains(hp.name)) recommend(q, rec_values[hp.name], rec->value("rationale", ""));
        qt.add(q);
        qt.connect(root.id, query::when_equals(d.id), q.id);
      }
    }
    const auto answers = ctx.ask_tree(qt);
    const std::string id = answers.at(root.id).get<std::string>();
    json values = json::object();
    for (const auto& hp : reg.hyperparams(id))
      if (auto it = answers.find(id + "." + hp.name); it != answers.end()) values[hp.name] = it->second;
    values = reg.complete_values(id, values);
    reg.build_optimizer(id, values);
    return {{kOptimizerKey, json{{"id", id}, {"values", values}}}};
  }
};

class BackendSelector final : public tree::Node {
 public:
  explicit BackendSelector(NodeSpec spec) : Node(std::move(spec)) {
    spec_.creates_keys = keys({kBackendKey});
    spec_.path_keys = keys({kBackendKey});
  }

  Delta execute(const ProblemData&, RunContext& ctx) const override {
    const json backends = ctx.request_info("backends");
    if (backends.empty()) fail(ErrorCode::UnknownBackend, "no backend is registered");
    query::Query q;
    q.id = kBackendKey;
    q.kind = query::QueryKind::SingleChoice;
    q.prompt = "Execution backend";
    q.path_key = kBackendKey;
    for (const auto& b : backends) q.options.push_back(b.at("id").get<std::string>());
    const std::string preferred = spec_.init_args.value("default", std::string("local_simulator"));
    q.default_value = std::find(q.options.begin(), q.options.end(), preferred) != q.options.end()
                          ? preferred
                          : q.options.front();
    const std::string id = ctx.ask(q).get<std::string>();
    for (const auto& b : backends)
      if (b.at("id") == id) return {{kBackendKey, b}};
    fail(ErrorCode::UnknownBackend, "backend '" + id + "' vanished from the registry");
  }
};

class VqaRunner final : public tree::Node {
 public:
  explicit VqaRunner(NodeSpec spec) : Node(std::move(spec)) {
    spec_.requires_keys = keys({ProblemData::kQuboKey, kAnsatzKey, kBackendKey});
    spec_.creates_keys = keys({kSolutionKey, kTraceKey});
    spec_.result_keys = keys({"trace"});
    spec_.path_keys = keys({"shots", "budget", "seed"});
  }

  Delta execute(const ProblemData& data, RunContext& ctx) const override {
    const auto& reg = builders::BuilderRegistry::global();
    const std::optional<json> rec = usable_recommendation(data);
    auto integer = [&](const char* id, const char* prompt, double min, std::int64_t fallback,
                       const char* rec_key) {
      query::Query q;
      q.id = id;
      q.kind = query::QueryKind::Integer;
      q.prompt = prompt;
      q.path_key = id;
      q.validator.min = min;
      q.default_value = spec_.init_args.value(id, fallback);
      if (rec && rec_key && rec->contains(rec_key)) recommend(q, rec->at(rec_key), rec->value("rationale", ""));
      return ctx.ask(q).get<std::int64_t>();
    };
    const std::int64_t shots = integer("shots", "Shots per circuit call (0 = exact expectation)", 0, 1024, "shots");
    const std::int64_t budget = integer("budget", "Circuit-call budget", 1, 300, "budget");
    const std::int64_t seed = integer("seed", "Random seed", 0, 0, nullptr);

    const json ansatz = data.get(kAnsatzKey);
    vqa::VqaConfig cfg;
    cfg.ansatz = reg.build_ansatz(ansatz.at("id").get<std::string>(), ansatz.at("values"));
    if (std::optional<json> opt = data.find(kOptimizerKey))
      cfg.optimizer = reg.build_optimizer(opt->at("id").get<std::string>(), opt->at("values"));
    cfg.backend = ctx.backend(data.get(kBackendKey).at("id").get<std::string>());
    cfg.n_shots = static_cast<std::uint64_t>(shots);
    cfg.budget = static_cast<std::uint64_t>(budget);
    cfg.seed = static_cast<std::uint64_t>(seed);
    const problem::QuboMatrix q = qubo_of(data);
    const vqa::VqaTrace trace = vqa::run_vqa(cfg, q);
    const double value = problem::qubo_objective(q, trace.best_bitstring);
    return {{kSolutionKey, json{{"bitstring", bits_json(trace.best_bitstring)}, {"qubo_value", value},
                                {"method", "vqa"}}},
            {kTraceKey, trace.to_json()}};
  }

  Delta interpret_result(const ProblemData& data, RunContext&) const override {
    json t = data.get(kTraceKey);
    t.erase("history");
    t["ansatz"] = data.get(kAnsatzKey);
    if (auto opt = data.find(kOptimizerKey)) t["optimizer"] = *opt;
    t["backend"] = data.get(kBackendKey).at("id");
    return {{"trace", t}};
  }
};

class ClassicalSolver final : public tree::Node {
 public:
  explicit ClassicalSolver(NodeSpec spec) : Node(std::move(spec)) {
    spec_.requires_keys = keys({ProblemData::kQuboKey});
    spec_.creates_keys = keys({kSolutionKey});
    spec_.result_keys = keys({"trace"});
    spec_.path_keys = keys({"seed"});
  }

  Delta execute(const ProblemData& data, RunContext& ctx) const override {
    const problem::QuboMatrix q = qubo_of(data);
    const std::size_t cap = spec_.init_args.value("exact_cap", problem::kBruteForceCap);
    if (q.size() <= cap) {
      const problem::Optimum opt = problem::brute_force_optimum(q, cap);
      return {{kSolutionKey, json{{"bitstring", bits_json(opt.bits)},
                                  {"qubo_value", opt.value},
                                  {"method", "brute_force"},
                                  {"evaluations", std::uint64_t{1} << q.size()}}}};
    }
    query::Query s;
    s.id = "seed";
    s.kind = query::QueryKind::Integer;
    s.prompt = "Random seed";
    s.path_key = "seed";
    s.validator.min = 0;
    s.default_value = 0;
    const auto seed = static_cast<std::uint64_t>(ctx.ask(s).get<std::int64_t>());
    const std::size_t restarts = spec_.init_args.value("restarts", std::size_t{32});
    const LocalSearchResult r = local_search(q, restarts, seed);
    return {{kSolutionKey, json{{"bitstring", bits_json(r.bits)},
                                {"qubo_value", r.value},
                                {"method", "local_search"},
                                {"restarts", restarts},
                                {"evaluations", r.evaluations}}}};
  }

  Delta interpret_result(const ProblemData& data, RunContext&) const override {
    json t = data.get(kSolutionKey);
    t.erase("bitstring");
    t["solver"] = "classical";
    return {{"trace", t}};
  }
};

template <class T>
tree::NodeFactory factory() {
  return [](NodeSpec spec) -> std::unique_ptr<tree::Node> { return std::make_unique<T>(std::move(spec)); };
}

tree::NodeFactory ansatz_factory(const std::string& builder) {
  return [builder](NodeSpec spec) -> std::unique_ptr<tree::Node> {
    return std::make_unique<AnsatzSetup>(std::move(spec), builder);
  };
}

}  // namespace

LocalSearchResult local_search(const problem::QuboMatrix& q, std::size_t restarts, std::uint64_t seed) {
  const std::size_t n = q.size();
  if (n == 0) fail(ErrorCode::InvalidMatrix, "empty QUBO");
  if (restarts == 0) fail(ErrorCode::OutOfRange, "restarts must be at least 1");
  LocalSearchResult best;
  best.value = std::numeric_limits<double>::infinity();
  std::uint64_t evaluations = 0;
  for (std::size_t r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(mix_seed(seed, r));
    problem::Bitstring x(n);
    for (auto& b : x) b = static_cast<std::uint8_t>(rng() & 1U);
    // flip gain of bit i: (1 - 2 x_i) * (Q_ii + sum_{j != i} Q_ij x_j)
    auto gain = [&](std::size_t i) {
      double field = q.at(i, i);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && x[j]) field += q.at(i, j);
      return (x[i] ? -1.0 : 1.0) * field;
    };
    while (true) {
      std::size_t pick = n;
      double step = -1e-12;
      for (std::size_t i = 0; i < n; ++i) {
        const double g = gain(i);
        ++evaluations;
        if (g < step) {
          step = g;
          pick = i;
        }
      }
      if (pick == n) break;
      x[pick] ^= 1U;
    }
    const double v = problem::qubo_objective(q, x);
    if (v < best.value) {
      best.value = v;
      best.bits = x;
    }
  }
  best.evaluations = evaluations;
  return best;
}

void register_basic_nodes(tree::NodeRegistry& r) {
  const std::string ns = kBasicNamespace;
  r.add(ns, "instance_loader", factory<InstanceLoader>(), "parses the instance and summarizes it");
  r.add(ns, "qubo_encoder", factory<QuboEncoder>(), "formulates the QUBO; decodes the solution on the way back");
  r.add(ns, "scalability_assessor", factory<ScalabilityAssessor>(),
        "shot estimates from the scaling database (recommendation or estimation mode)");
  r.add(ns, "algorithm_selector", factory<AlgorithmSelector>(), "chooses the algorithm branch");
  r.add(ns, "hea_setup", ansatz_factory("hardware_efficient"), "hardware-efficient ansatz for VQE");
  r.add(ns, "qaoa_setup", ansatz_factory("qaoa"), "QAOA depth");
  r.add(ns, "lr_qaoa_setup", ansatz_factory("lr_qaoa"), "linear-ramp QAOA depth and ramp");
  r.add(ns, "ansatz_setup", ansatz_factory(""), "any ansatz builder named by init_args.builder");
  r.add(ns, "optimizer_selector", factory<OptimizerSelector>(), "classical optimizer and its hyperparameters");
  r.add(ns, "backend_selector", factory<BackendSelector>(), "execution backend from the registry");
  r.add(ns, "vqa_runner", factory<VqaRunner>(), "runs the variational loop");
  r.add(ns, "classical_solver", factory<ClassicalSolver>(), "brute force up to 20 variables, local search beyond");
}

const tree::NodeRegistry& standard_registry() {
  static const tree::NodeRegistry reg = [] {
    tree::NodeRegistry r;
    tree::register_core_nodes(r);
    register_basic_nodes(r);
    return r;
  }();
  return reg;
}

json basic_tree_json() {
  return json::parse(R"({
  "node_sources": ["qdt.basic", "qdt.core"],
  "root": "load",
  "flags": {"automation": "automatic", "verbosity": "info"},
  "nodes": [
    {"name": "load", "type": "instance_loader", "children": ["encode"]},
    {"name": "encode", "type": "qubo_encoder", "children": ["assess"]},
    {"name": "assess", "type": "scalability_assessor", "children": ["select_algorithm"],
     "init_args": {"mode": "recommendation"}},
    {"name": "select_algorithm", "type": "algorithm_selector",
     "children": ["vqe_setup", "qaoa_setup", "lr_qaoa_setup", "classical"],
     "init_args": {"default": "qaoa",
                   "routes": {"vqe": "vqe_setup", "qaoa": "qaoa_setup", "lr_qaoa": "lr_qaoa_setup",
                              "classical": "classical"}}},
    {"name": "vqe_setup", "type": "hea_setup", "children": ["select_optimizer"]},
    {"name": "qaoa_setup", "type": "qaoa_setup", "children": ["select_optimizer"]},
    {"name": "lr_qaoa_setup", "type": "lr_qaoa_setup", "children": ["select_backend"]},
    {"name": "select_optimizer", "type": "optimizer_selector", "children": ["select_backend"]},
    {"name": "select_backend", "type": "backend_selector", "children": ["run_vqa"]},
    {"name": "run_vqa", "type": "vqa_runner", "children": []},
    {"name": "classical", "type": "classical_solver", "children": []}
  ]
})");
}

json basic_tree_json(const std::string& database) {
  json t = basic_tree_json();
  for (auto& n : t["nodes"])
    if (n["type"] == "scalability_assessor") n["init_args"]["database"] = database;
  return t;
}

}  // namespace qdt::nodes
