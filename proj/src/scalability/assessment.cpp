#include "qdt/scalability/assessment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "qdt/common/error.hpp"

namespace qdt::scalability {

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string db_class(const std::string& declared) {
  if (declared.empty() || declared == "qubo") return kGeneralSlice;
  return declared;
}

}  // namespace

json ProblemCharacteristics::to_json() const {
  return json{{"n", n},
              {"density", density},
              {"declared_class", declared_class.empty() ? json(nullptr) : json(declared_class)},
              {"matched_class", matched_class},
              {"grid_density", grid_density},
              {"note", note}};
}

ProblemCharacteristics ProblemCharacteristics::from_json(const json& doc) {
  ProblemCharacteristics p;
  p.n = doc.at("n").get<std::size_t>();
  p.density = doc.at("density").get<double>();
  if (!doc.at("declared_class").is_null()) p.declared_class = doc.at("declared_class").get<std::string>();
  p.matched_class = doc.at("matched_class").get<std::string>();
  p.grid_density = doc.at("grid_density").get<double>();
  p.note = doc.value("note", std::string{});
  return p;
}

double nearest_grid_density(const ScalingDatabase& db, const std::string& problem_type, double density) {
  const std::vector<double> grid = db.densities(problem_type);
  if (grid.empty()) fail(ErrorCode::EmptyDatabaseSlice, "database has no records for '" + problem_type + "'");
  double best = grid.front();
  for (double g : grid)
    // ascending grid: strict improvement keeps the lower density on ties
    if (std::abs(g - density) < std::abs(best - density) - 1e-12) best = g;
  return best;
}

ProblemCharacteristics analyze_qubo(const problem::QuboMatrix& q, const ScalingDatabase& db,
                                    const std::optional<std::string>& declared_class,
                                    std::optional<double> class_density) {
  ProblemCharacteristics p;
  p.n = q.size();
  p.density = problem::qubo_density(q);
  if (declared_class) p.declared_class = *declared_class;
  p.matched_class = db_class(p.declared_class);
  if (p.matched_class != kGeneralSlice && class_density) p.density = *class_density;
  if (q.is_zero() || !(p.density > 0))
    fail(ErrorCode::EmptyDatabaseSlice, "zero matrix has no matching database slice");
  p.grid_density = nearest_grid_density(db, p.matched_class, p.density);
  if (std::abs(p.grid_density - p.density) > 1e-9) {
    std::ostringstream note;
    note << "density " << p.density << " matched to nearest grid point " << p.grid_density;
    p.note = note.str();
  }
  return p;
}

ProblemCharacteristics analyze_instance(const problem::ProblemInstance& instance, const ScalingDatabase& db,
                                        const std::optional<std::string>& override_class) {
  const problem::Formulation f = problem::formulate_problem(instance);
  const std::string cls = override_class.value_or(instance.problem_class);
  std::optional<double> density;
  if (cls == instance.problem_class) {
    const auto& pc = problem::ProblemRegistry::builtin().get(instance.problem_class);
    if (pc.graph_based()) {
      density = problem::graph_density(instance);
    } else if (instance.problem_class == "knapsack") {
      double total = 0;
      for (const auto& w : instance.payload.at("weights")) total += w.get<double>();
      if (total > 0) density = instance.payload.at("capacity").get<double>() / total;
    }
  }
  return analyze_qubo(f.qubo, db, cls, density);
}

json CombinationEntry::to_json() const {
  json est = json::array();
  for (const auto& e : estimates) est.push_back(e.to_json());
  return json{{"vqa", vqa},
              {"optimizer", optimizer},
              {"estimates", est},
              {"worst_case", worst_case ? number_or_null(*worst_case) : json(nullptr)},
              {"worst_case_infinite", worst_case && !std::isfinite(*worst_case)},
              {"n_calls", number_or_null(n_calls)},
              {"never_succeeds_sizes", never_succeeds_sizes},
              {"status", to_string(status)},
              {"benchmark", benchmark.to_json()}};
}

CombinationEntry CombinationEntry::from_json(const json& doc) {
  CombinationEntry e;
  e.vqa = doc.at("vqa").get<std::string>();
  e.optimizer = doc.at("optimizer").get<std::string>();
  for (const auto& h : doc.at("estimates")) e.estimates.push_back(HypothesisEstimate::from_json(h));
  if (!doc.at("worst_case").is_null()) e.worst_case = doc.at("worst_case").get<double>();
  else if (doc.value("worst_case_infinite", false)) e.worst_case = INFINITY;
  e.n_calls = doc.at("n_calls").is_null() ? INFINITY : doc.at("n_calls").get<double>();
  e.never_succeeds_sizes = doc.at("never_succeeds_sizes").get<std::size_t>();
  e.status = status_from_string(doc.at("status").get<std::string>());
  e.benchmark = BenchmarkSettings::from_json(doc.at("benchmark"));
  return e;
}

json Recommendation::to_json() const {
  if (classical_fallback) return json{{"classical_fallback", true}, {"rationale", rationale}};
  return json{{"classical_fallback", false}, {"vqa", vqa}, {"optimizer", optimizer}, {"rationale", rationale}};
}

Recommendation Recommendation::from_json(const json& doc) {
  Recommendation r;
  r.classical_fallback = doc.at("classical_fallback").get<bool>();
  r.rationale = doc.value("rationale", std::string{});
  if (!r.classical_fallback) {
    r.vqa = doc.at("vqa").get<std::string>();
    r.optimizer = doc.at("optimizer").get<std::string>();
  }
  return r;
}

const CombinationEntry* Assessment::find(const std::string& vqa, const std::string& optimizer) const {
  for (const auto& e : entries)
    if (e.vqa == vqa && e.optimizer == optimizer) return &e;
  return nullptr;
}

json Assessment::to_json() const {
  json e = json::array();
  for (const auto& c : entries) e.push_back(c.to_json());
  return json{{"problem", problem.to_json()},
              {"mode", mode},
              {"boundary", boundary},
              {"boundary_log2", problem.n},
              {"combinations", e},
              {"recommendation", recommendation.to_json()}};
}

Assessment Assessment::from_json(const json& doc) {
  Assessment a;
  a.problem = ProblemCharacteristics::from_json(doc.at("problem"));
  a.mode = doc.at("mode").get<std::string>();
  a.boundary = doc.at("boundary").get<double>();
  for (const auto& c : doc.at("combinations")) a.entries.push_back(CombinationEntry::from_json(c));
  a.recommendation = Recommendation::from_json(doc.at("recommendation"));
  return a;
}

Assessment assess(const ProblemCharacteristics& problem, const ScalingDatabase& db,
                  const std::optional<std::pair<std::string, std::string>>& combo) {
  Assessment a;
  a.problem = problem;
  a.mode = combo ? "estimation" : "recommendation";
  a.boundary = std::ldexp(1.0, static_cast<int>(problem.n));
  const double n = static_cast<double>(problem.n);

  std::map<std::pair<std::string, std::string>, std::vector<const ScalingRecord*>> groups;
  for (const ScalingRecord* r : db.slice(problem.matched_class, problem.grid_density))
    if (!combo || (r->vqa == combo->first && r->optimizer == combo->second)) groups[{r->vqa, r->optimizer}].push_back(r);
  if (groups.empty())
    fail(ErrorCode::EmptyDatabaseSlice, combo ? "combination " + combo->first + "+" + combo->second +
                                                    " is not in the matched database slice"
                                              : "matched database slice is empty");

  for (const auto& [key, recs] : groups) {
    CombinationEntry e;
    e.vqa = key.first;
    e.optimizer = key.second;
    e.benchmark = recs.front()->benchmark;
    e.never_succeeds_sizes = recs.front()->never_succeeds_sizes;
    e.n_calls = recs.front()->calls.calls(n);
    for (Hypothesis h : kHypotheses) {
      HypothesisEstimate est;
      est.hypothesis = h;
      for (const ScalingRecord* r : recs) {
        if (r->fit.hypothesis != h) continue;
        est.valid = r->fit.valid;
        if (r->fit.a != 0.0 || r->fit.b != 0.0) est.shots = estimate_shots(r->fit, r->kappa, n);
      }
      e.estimates.push_back(est);
    }
    e.worst_case = worst_case(e.estimates);
    e.status = classify(e.estimates, e.never_succeeds_sizes, n, e.n_calls);
    a.entries.push_back(std::move(e));
  }
  a.recommendation = recommend(a);
  return a;
}

Recommendation recommend(const Assessment& assessment) {
  const CombinationEntry* best = nullptr;
  auto cost = [](const CombinationEntry& e) { return std::log2(*e.worst_case) + std::log2(e.n_calls); };
  for (const auto& e : assessment.entries) {
    if (e.status != Status::Feasible) continue;
    if (!best) {
      best = &e;
      continue;
    }
    const double s = *e.worst_case, bs = *best->worst_case;
    if (s != bs) {
      if (s < bs) best = &e;
      continue;
    }
    const double c = cost(e), bc = cost(*best);
    if (c != bc) {
      if (c < bc) best = &e;
      continue;
    }
    if (std::tie(e.vqa, e.optimizer) < std::tie(best->vqa, best->optimizer)) best = &e;
  }
  Recommendation r;
  if (!best) {
    r.classical_fallback = true;
    r.rationale = "no combination falls below the quantum disadvantage boundary 2^" +
                  std::to_string(assessment.problem.n) + "; use a classical solver";
    return r;
  }
  r.classical_fallback = false;
  r.vqa = best->vqa;
  r.optimizer = best->optimizer;
  r.rationale = "lowest worst-case shot estimate among feasible combinations (" + format_shots(*best->worst_case) +
                " shots)";
  return r;
}

std::string format_shots(double shots) {
  if (!std::isfinite(shots)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", shots);
  return buf;
}

std::string render_table(const Assessment& assessment) {
  std::vector<std::string> vqas;
  for (const auto& e : assessment.entries)
    if (std::find(vqas.begin(), vqas.end(), e.vqa) == vqas.end()) vqas.push_back(e.vqa);

  std::ostringstream out;
  out << "VQA | Optimizer | Worst-case n_shots | Status\n";
  for (const auto& v : vqas) {
    std::vector<const CombinationEntry*> known, nc;
    for (const auto& e : assessment.entries) {
      if (e.vqa != v) continue;
      (e.status == Status::NotCharacterizable ? nc : known).push_back(&e);
    }
    std::stable_sort(known.begin(), known.end(),
                     [](const auto* a, const auto* b) { return *a->worst_case < *b->worst_case; });
    bool first = true;
    auto row = [&](const std::string& opt, const std::string& shots, const std::string& status) {
      out << (first ? v : std::string()) << " | " << opt << " | " << shots << " | " << status << "\n";
      first = false;
    };
    for (const auto* e : known) {
      std::string status = to_string(e->status);
      if (!assessment.recommendation.classical_fallback && assessment.recommendation.vqa == e->vqa &&
          assessment.recommendation.optimizer == e->optimizer)
        status += " [recommended]";
      row(e->optimizer, format_shots(*e->worst_case), status);
    }
    if (!nc.empty()) {
      std::string names;
      for (const auto* e : nc) names += (names.empty() ? "" : ", ") + e->optimizer;
      row(names, "n.c.", "--");
    }
  }
  if (assessment.recommendation.classical_fallback) out << "recommendation: classical solver\n";
  else out << "recommendation: " << assessment.recommendation.vqa << " + " << assessment.recommendation.optimizer << "\n";
  return out.str();
}

json recommended_path(const Assessment& assessment, const OutputOptions& options) {
  const Recommendation& r = assessment.recommendation;
  if (r.classical_fallback) return json{{"algorithm", "classical"}, {"seed", options.seed}};
  const CombinationEntry* e = assessment.find(r.vqa, r.optimizer);
  if (!e) fail(ErrorCode::InvalidRecord, "recommended combination is missing from the assessment");
  const std::string ansatz = e->benchmark.ansatz.at("id").get<std::string>();
  const json values = e->benchmark.ansatz.value("values", json::object());
  json path;
  if (ansatz == "hardware_efficient") {
    path["algorithm"] = "vqe";
    path["layers"] = values.at("layers");
  } else if (ansatz == "qaoa") {
    path["algorithm"] = "qaoa";
    path["p"] = values.at("p");
  } else if (ansatz == "lr_qaoa") {
    path["algorithm"] = "lr_qaoa";
    path["p"] = values.at("p");
    path["delta"] = values.at("delta");
  } else {
    fail(ErrorCode::InvalidRecord, "no tree path for ansatz '" + ansatz + "'");
  }
  path["optimizer"] = e->benchmark.optimizer.at("id");
  path["optimizer_params"] = e->benchmark.optimizer.value("values", json::object());
  path["backend"] = options.backend;
  path["shots"] = static_cast<std::uint64_t>(*e->worst_case);
  path["budget"] = e->benchmark.budget;
  path["seed"] = options.seed;
  return path;
}

void write_outputs(const Assessment& assessment, const std::filesystem::path& dir, const OutputOptions& options) {
  const json path = recommended_path(assessment, options);
  json meta{{"problem", assessment.problem.to_json()}, {"recommendation", assessment.recommendation.to_json()}};
  if (const auto& r = assessment.recommendation; !r.classical_fallback)
    meta["predicted_shots"] = *assessment.find(r.vqa, r.optimizer)->worst_case;
  const json config{{"tree", options.tree}, {"path", path}, {"meta", meta}};
  try {
    std::filesystem::create_directories(dir);
    write_text_file(dir / kAssessmentFile, assessment.to_json().dump(2) + "\n");
    write_text_file(dir / kRecommendedConfigFile, json_to_yaml(config));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::IoFailure, "cannot write outputs to '" + dir.string() + "': " + e.what());
  }
}

}  // namespace qdt::scalability
