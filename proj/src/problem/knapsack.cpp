#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "qdt/problem/problem.hpp"
#include "schema.hpp"

namespace qdt::problem {

namespace {

struct Items {
  std::vector<double> values;
  std::vector<long long> weights;
  long long capacity;
  double penalty;
};

Items items_of(const json& payload) {
  Items it;
  it.values = payload.at("values").get<std::vector<double>>();
  it.weights = payload.at("weights").get<std::vector<long long>>();
  it.capacity = payload.at("capacity").get<long long>();
  it.penalty = payload.at("penalty").get<double>();
  return it;
}

/// Slack coefficients representing every integer in [0, capacity]:
/// 1, 2, ..., 2^(k-2), capacity - (2^(k-1) - 1).
std::vector<long long> binary_slack(long long capacity) {
  std::vector<long long> coeffs;
  if (capacity <= 0) return coeffs;
  long long covered = 0;
  long long next = 1;
  while (covered + next < capacity) {
    coeffs.push_back(next);
    covered += next;
    next *= 2;
  }
  coeffs.push_back(capacity - covered);
  return coeffs;
}

// maximize sum v x  s.t.  sum w x <= C, encoded as
// min  -sum v x + P (sum w x + sum c s - C)^2
class Knapsack final : public ProblemClass {
 public:
  std::string name() const override { return "knapsack"; }
  std::vector<std::string> modes() const override { return {"binary_slack", "unary_slack"}; }
  Sense sense() const override { return Sense::Maximize; }

  json from_dict(const json& doc) const override {
    detail::reject_unknown_keys(doc, {"values", "weights", "capacity", "penalty"});
    const json& values = detail::require(doc, "values");
    const json& weights = detail::require(doc, "weights");
    if (!values.is_array() || values.empty())
      detail::schema_error("values", "expected a non-empty array of numbers");
    if (!weights.is_array() || weights.size() != values.size())
      detail::schema_error("weights", "expected an array with one weight per value");
    std::vector<double> v;
    std::vector<long long> w;
    for (std::size_t i = 0; i < values.size(); ++i) {
      v.push_back(detail::finite_number(values[i], "values[" + std::to_string(i) + "]"));
      long long wi = detail::integer(weights[i], "weights[" + std::to_string(i) + "]");
      if (wi <= 0) detail::schema_error("weights[" + std::to_string(i) + "]", "must be a positive integer");
      w.push_back(wi);
    }
    long long capacity = detail::integer(detail::require(doc, "capacity"), "capacity");
    if (capacity < 0) detail::schema_error("capacity", "must be a nonnegative integer");
    double penalty = 0.0;
    if (auto it = doc.find("penalty"); it != doc.end()) {
      penalty = detail::finite_number(*it, "penalty");
      if (penalty <= 0.0) detail::schema_error("penalty", "must be positive");
    } else {
      double max_value = 0.0;
      for (double x : v) max_value = std::max(max_value, std::abs(x));
      penalty = 2.0 * max_value * static_cast<double>(v.size());
      if (penalty == 0.0) penalty = 1.0;
    }
    return json{{"values", v}, {"weights", w}, {"capacity", capacity}, {"penalty", penalty}};
  }

  std::size_t variable_count(const json& payload) const override {
    return payload.at("values").size();
  }

  Formulation formulate_problem(const json& payload, const std::string& mode) const override {
    Items it = items_of(payload);
    const std::size_t n = it.values.size();
    const long long total = std::accumulate(it.weights.begin(), it.weights.end(), 0LL);

    const bool binding = total > it.capacity;
    std::vector<long long> slack;
    if (binding) {
      // constraint can bind: add slack variables
      slack = mode == "unary_slack" ? std::vector<long long>(static_cast<std::size_t>(it.capacity), 1)
                                    : binary_slack(it.capacity);
    }
    std::vector<double> a;
    for (long long w : it.weights) a.push_back(static_cast<double>(w));
    for (long long c : slack) a.push_back(static_cast<double>(c));

    Formulation f;
    f.qubo = QuboMatrix(a.size());
    f.decision_variables = n;
    f.scale = -1.0;
    for (std::size_t i = 0; i < n; ++i) f.qubo.add(i, i, -it.values[i]);
    if (binding) {
      const double p = it.penalty;
      const double c = static_cast<double>(it.capacity);
      for (std::size_t i = 0; i < a.size(); ++i) {
        f.qubo.add(i, i, p * (a[i] * a[i] - 2.0 * c * a[i]));
        for (std::size_t j = i + 1; j < a.size(); ++j) f.qubo.add(i, j, 2.0 * p * a[i] * a[j]);
      }
      f.offset = -p * c * c;
    }
    return f;
  }

  ObjectiveReport evaluate(const json& payload, const Bitstring& x) const override {
    Items it = items_of(payload);
    ObjectiveReport report;
    report.bitstring = x;
    double value = 0.0;
    long long weight = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!x[i]) continue;
      value += it.values[i];
      weight += it.weights[i];
    }
    report.objective_value = value;
    report.feasible = weight <= it.capacity;
    // default formulation with the best slack: zero penalty when feasible,
    // P * overflow^2 otherwise (slack cannot go negative)
    const long long total = std::accumulate(it.weights.begin(), it.weights.end(), 0LL);
    double qubo = -value;
    if (total > it.capacity) {
      const double c = static_cast<double>(it.capacity);
      const double overflow = std::max(0.0, static_cast<double>(weight) - c);
      qubo += it.penalty * overflow * overflow - it.penalty * c * c;
    }
    report.qubo_value = qubo;
    return report;
  }
};

}  // namespace

std::shared_ptr<const ProblemClass> make_knapsack_class() { return std::make_shared<Knapsack>(); }

ProblemInstance random_knapsack(std::size_t items, double capacity_ratio, std::uint64_t seed) {
  if (items == 0) fail(ErrorCode::SchemaViolation, "random_knapsack needs at least one item");
  if (!(capacity_ratio > 0.0 && capacity_ratio <= 1.0))
    fail(ErrorCode::InvalidDensity, "capacity ratio must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> draw(1, 10);
  std::vector<long long> weights;
  std::vector<double> values;
  long long total = 0;
  for (std::size_t i = 0; i < items; ++i) {
    weights.push_back(draw(rng));
    values.push_back(draw(rng));
    total += weights.back();
  }
  auto capacity = static_cast<long long>(std::floor(capacity_ratio * static_cast<double>(total)));
  return parse_instance(json{{"problem_class", "knapsack"},
                             {"values", values},
                             {"weights", weights},
                             {"capacity", capacity}});
}

}  // namespace qdt::problem
