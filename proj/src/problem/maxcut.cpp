#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "qdt/problem/problem.hpp"
#include "schema.hpp"

namespace qdt::problem {

namespace {

struct Edge {
  std::size_t u;
  std::size_t v;
  double w;
};

struct Graph {
  std::size_t nodes;
  std::vector<Edge> edges;
};

Graph graph_of(const json& payload) {
  Graph g{payload.at("nodes").get<std::size_t>(), {}};
  for (const auto& e : payload.at("edges"))
    g.edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
  return g;
}

// MaxCut as minimization: cut(x) = sum_{(u,v)} w (x_u + x_v - 2 x_u x_v),
// Q = -cut, i.e. Q_uu -= w, Q_vv -= w, Q_uv += 2w.
class MaxCut final : public ProblemClass {
 public:
  std::string name() const override { return "maxcut"; }
  std::vector<std::string> modes() const override { return {"standard", "normalized"}; }
  Sense sense() const override { return Sense::Maximize; }
  bool graph_based() const override { return true; }

  json from_dict(const json& doc) const override {
    detail::reject_unknown_keys(doc, {"nodes", "edges"});
    long long nodes = detail::integer(detail::require(doc, "nodes"), "nodes");
    if (nodes < 1) detail::schema_error("nodes", "must be at least 1");
    const json& edges = detail::require(doc, "edges");
    if (!edges.is_array()) detail::schema_error("edges", "expected an array of [u, v, weight]");

    json normalized = json::array();
    std::set<std::pair<long long, long long>> seen;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const json& e = edges[k];
      const std::string field = "edges[" + std::to_string(k) + "]";
      if (!e.is_array() || (e.size() != 2 && e.size() != 3))
        detail::schema_error(field, "expected [u, v] or [u, v, weight]");
      long long u = detail::integer(e[0], field);
      long long v = detail::integer(e[1], field);
      double w = e.size() == 3 ? detail::finite_number(e[2], field) : 1.0;
      if (u < 0 || v < 0 || u >= nodes || v >= nodes)
        detail::schema_error(field, "node index out of range");
      if (u == v) detail::schema_error(field, "self loops are not allowed");
      if (u > v) std::swap(u, v);
      if (!seen.emplace(u, v).second) detail::schema_error(field, "duplicate edge");
      normalized.push_back(json::array({u, v, w}));
    }
    return json{{"nodes", nodes}, {"edges", normalized}};
  }

  std::size_t variable_count(const json& payload) const override {
    return payload.at("nodes").get<std::size_t>();
  }

  Formulation formulate_problem(const json& payload, const std::string& mode) const override {
    Graph g = graph_of(payload);
    Formulation f;
    f.qubo = QuboMatrix(g.nodes);
    f.decision_variables = g.nodes;
    double divisor = 1.0;
    if (mode == "normalized") {
      double max_w = 0.0;
      for (const auto& e : g.edges) max_w = std::max(max_w, std::abs(e.w));
      // power of two keeps the rescaling exact
      if (max_w > 0.0) divisor = std::exp2(std::ceil(std::log2(max_w)));
    }
    for (const auto& e : g.edges) {
      const double w = e.w / divisor;
      f.qubo.add(e.u, e.u, -w);
      f.qubo.add(e.v, e.v, -w);
      f.qubo.add(e.u, e.v, 2.0 * w);
    }
    f.scale = -divisor;
    f.offset = 0.0;
    return f;
  }

  ObjectiveReport evaluate(const json& payload, const Bitstring& x) const override {
    Graph g = graph_of(payload);
    ObjectiveReport report;
    report.bitstring = x;
    double cut = 0.0;
    for (const auto& e : g.edges)
      if (x[e.u] != x[e.v]) cut += e.w;
    report.objective_value = cut;
    report.qubo_value = qubo_objective(formulate_problem(payload, "standard").qubo, x);
    report.feasible = true;
    return report;
  }

  double graph_density(const json& payload) const override {
    const double n = payload.at("nodes").get<double>();
    if (n < 2) return 0.0;
    return static_cast<double>(payload.at("edges").size()) / (n * (n - 1.0) / 2.0);
  }
};

}  // namespace

std::shared_ptr<const ProblemClass> make_maxcut_class() { return std::make_shared<MaxCut>(); }

ProblemInstance random_maxcut(std::size_t nodes, double density, std::uint64_t seed) {
  if (nodes < 2) fail(ErrorCode::InvalidDensity, "random_maxcut needs at least 2 nodes");
  if (!(density > 0.0 && density <= 1.0))
    fail(ErrorCode::InvalidDensity, "density must lie in (0, 1]");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t u = 0; u < nodes; ++u)
    for (std::size_t v = u + 1; v < nodes; ++v) pairs.emplace_back(u, v);
  auto count = static_cast<std::size_t>(std::llround(density * static_cast<double>(pairs.size())));
  count = std::clamp<std::size_t>(count, 1, pairs.size());

  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, pairs.size() - 1);
    std::swap(pairs[k], pairs[pick(rng)]);
  }
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::vector<std::pair<std::size_t, std::size_t>> chosen(pairs.begin(),
                                                          pairs.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(chosen.begin(), chosen.end());
  json edges = json::array();
  for (const auto& [u, v] : chosen) edges.push_back(json::array({u, v, 1.0 - weight(rng)}));
  return parse_instance(json{{"problem_class", "maxcut"}, {"nodes", nodes}, {"edges", edges}});
}

}  // namespace qdt::problem
