#include "qdt/problem/problem.hpp"
#include "schema.hpp"

namespace qdt::problem {

namespace {

class Qubo final : public ProblemClass {
 public:
  std::string name() const override { return "qubo"; }
  std::vector<std::string> modes() const override { return {"direct"}; }
  Sense sense() const override { return Sense::Minimize; }

  json from_dict(const json& doc) const override {
    detail::reject_unknown_keys(doc, {"matrix"});
    const json& m = detail::require(doc, "matrix");
    try {
      QuboMatrix q = QuboMatrix::from_json(m);
      if (q.size() == 0) detail::schema_error("matrix", "must have at least one row");
      return json{{"matrix", q.to_json()}};
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SchemaViolation) throw;
      detail::schema_error("matrix", e.what());
    }
  }

  std::size_t variable_count(const json& payload) const override {
    return payload.at("matrix").size();
  }

  Formulation formulate_problem(const json& payload, const std::string&) const override {
    Formulation f;
    f.qubo = QuboMatrix::from_json(payload.at("matrix"));
    f.decision_variables = f.qubo.size();
    return f;
  }

  ObjectiveReport evaluate(const json& payload, const Bitstring& x) const override {
    ObjectiveReport report;
    report.bitstring = x;
    report.qubo_value = qubo_objective(QuboMatrix::from_json(payload.at("matrix")), x);
    report.objective_value = report.qubo_value;
    return report;
  }
};

/// Generated instance: {"n", "density", "seed"}; the matrix is rebuilt on demand.
class RandomQubo final : public ProblemClass {
 public:
  std::string name() const override { return "random_qubo"; }
  std::vector<std::string> modes() const override { return {"direct"}; }
  Sense sense() const override { return Sense::Minimize; }

  json from_dict(const json& doc) const override {
    detail::reject_unknown_keys(doc, {"n", "density", "seed"});
    long long n = detail::integer(detail::require(doc, "n"), "n");
    if (n < 1) detail::schema_error("n", "must be at least 1");
    double density = detail::finite_number(detail::require(doc, "density"), "density");
    if (!(density > 0.0 && density <= 1.0)) detail::schema_error("density", "must lie in (0, 1]");
    long long seed = 0;
    if (auto it = doc.find("seed"); it != doc.end()) seed = detail::integer(*it, "seed");
    if (seed < 0) detail::schema_error("seed", "must be nonnegative");
    return json{{"n", n}, {"density", density}, {"seed", seed}};
  }

  std::size_t variable_count(const json& payload) const override {
    return payload.at("n").get<std::size_t>();
  }

  Formulation formulate_problem(const json& payload, const std::string&) const override {
    Formulation f;
    f.qubo = matrix(payload);
    f.decision_variables = f.qubo.size();
    return f;
  }

  ObjectiveReport evaluate(const json& payload, const Bitstring& x) const override {
    ObjectiveReport report;
    report.bitstring = x;
    report.qubo_value = qubo_objective(matrix(payload), x);
    report.objective_value = report.qubo_value;
    return report;
  }

 private:
  static QuboMatrix matrix(const json& payload) {
    return random_qubo(payload.at("n").get<std::size_t>(), payload.at("density").get<double>(),
                       payload.at("seed").get<std::uint64_t>());
  }
};

}  // namespace

std::shared_ptr<const ProblemClass> make_qubo_class() { return std::make_shared<Qubo>(); }
std::shared_ptr<const ProblemClass> make_random_qubo_class() {
  return std::make_shared<RandomQubo>();
}

}  // namespace qdt::problem
