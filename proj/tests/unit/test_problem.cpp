#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qdt/problem/problem.hpp"

using namespace qdt;
using namespace qdt::problem;

namespace {

const char* kTriangle =
    R"({"problem_class":"maxcut","nodes":3,"edges":[[0,1,1.0],[1,2,1.0],[0,2,1.0]]})";

// Enumerates auxiliary bits of a formulation for a fixed decision vector.
double min_over_aux(const Formulation& f, const Bitstring& x) {
  const std::size_t aux = f.qubo.size() - f.decision_variables;
  double best = INFINITY;
  for (std::uint64_t s = 0; s < (1ULL << aux); ++s) {
    Bitstring z = x;
    for (std::size_t k = 0; k < aux; ++k) z.push_back((s >> k) & 1U);
    best = std::min(best, test::dense_objective(test::to_dense(f.qubo), z));
  }
  return best;
}

}  // namespace

TEST_CASE("parse_instance accepts the documented examples") {
  auto qubo = parse_instance(R"({"problem_class":"qubo","matrix":[[1,0],[0,1]]})");
  CHECK(qubo.problem_class == "qubo");
  CHECK(variable_count(qubo) == 2);

  auto tri = parse_instance(kTriangle);
  CHECK(tri.problem_class == "maxcut");
  CHECK(variable_count(tri) == 3);
}

TEST_CASE("parse_instance diagnostics") {
  CHECK(test::code_of([] { parse_instance(R"({"problem_class":"tsp","cities":[]})"); }) ==
        ErrorCode::UnknownProblemClass);
  try {
    parse_instance(R"({"problem_class":"qubo","matrix":[[1]],"colour":"red"})");
    FAIL("expected SchemaViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaViolation);
    CHECK(std::string(e.what()).find("colour") != std::string::npos);
  }
  CHECK(test::code_of([] { parse_instance(R"({"matrix":[[1]]})"); }) == ErrorCode::SchemaViolation);
  CHECK(test::code_of([] { parse_instance("{not json"); }) == ErrorCode::SchemaViolation);
  CHECK(test::code_of([] {
          parse_instance(R"({"problem_class":"maxcut","nodes":2,"edges":[[0,0,1]]})");
        }) == ErrorCode::SchemaViolation);
  CHECK(test::code_of([] {
          parse_instance(R"({"problem_class":"maxcut","nodes":2,"edges":[[0,1],[1,0]]})");
        }) == ErrorCode::SchemaViolation);
  CHECK(test::code_of([] {
          parse_instance(R"({"problem_class":"knapsack","values":[1],"weights":[1.5],"capacity":1})");
        }) == ErrorCode::SchemaViolation);
  CHECK(test::code_of([] {
          parse_instance(R"({"problem_class":"qubo","matrix":[[1]],"formulation_mode":"fancy"})");
        }) == ErrorCode::SchemaViolation);
}

TEST_CASE("formulate_problem examples") {
  auto tri = parse_instance(kTriangle);
  Formulation f = formulate_problem(tri);
  for (std::size_t i = 0; i < 3; ++i) CHECK(f.qubo.at(i, i) == -2.0);
  CHECK(f.qubo.at(0, 1) == 2.0);
  CHECK(f.qubo.at(0, 2) == 2.0);
  CHECK(f.qubo.at(1, 2) == 2.0);
  auto best = test::enumerate_min(test::to_dense(f.qubo));
  CHECK(best.second == -2.0);
  // every 2-1 partition attains the minimum
  for (std::uint64_t idx = 1; idx < 7; ++idx)
    CHECK(qubo_objective(f.qubo, bits_from_index(idx, 3)) == -2.0);

  auto knap = parse_instance(
      R"({"problem_class":"knapsack","values":[5],"weights":[1],"capacity":1,"penalty":10})");
  Formulation k = formulate_problem(knap);
  REQUIRE(k.qubo.size() == 1);
  CHECK(k.qubo.at(0, 0) == -5.0);
  CHECK(test::enumerate_min(test::to_dense(k.qubo)).second == -5.0);

  auto raw = parse_instance(R"({"problem_class":"qubo","matrix":[[1,2],[4,3]]})");
  Formulation r = formulate_problem(raw);
  CHECK(r.qubo == QuboMatrix({{1, 2}, {4, 3}}));
  CHECK(r.qubo.at(0, 1) == 6.0);

  CHECK(test::code_of([&] { formulate_problem(tri, "ising"); }) == ErrorCode::UnknownMode);
}

TEST_CASE("knapsack default penalty is 2 * max value * item count") {
  auto knap = parse_instance(
      R"({"problem_class":"knapsack","values":[3,7],"weights":[2,2],"capacity":3})");
  CHECK(knap.payload["penalty"].get<double>() == 28.0);
}

TEST_CASE("evaluate_solution examples") {
  auto tri = parse_instance(kTriangle);
  auto report = evaluate_solution(tri, Bitstring{1, 0, 0});
  CHECK(report.objective_value == 2.0);
  CHECK(report.feasible);
  CHECK(report.qubo_value == -2.0);

  auto knap = parse_instance(
      R"({"problem_class":"knapsack","values":[4,5],"weights":[3,3],"capacity":4})");
  auto over = evaluate_solution(knap, Bitstring{1, 1});
  CHECK_FALSE(over.feasible);
  CHECK(over.objective_value == 9.0);
  auto ok = evaluate_solution(knap, Bitstring{0, 1});
  CHECK(ok.feasible);
  CHECK(ok.objective_value == 5.0);

  auto raw = parse_instance(R"({"problem_class":"qubo","matrix":[[1,-3],[0,2]]})");
  for (std::uint64_t idx = 0; idx < 4; ++idx) {
    auto r = evaluate_solution(raw, bits_from_index(idx, 2));
    CHECK(r.objective_value == r.qubo_value);
  }
  CHECK(test::code_of([&] { evaluate_solution(tri, Bitstring{1, 0}); }) ==
        ErrorCode::LengthMismatch);
}

TEST_CASE("graph density") {
  CHECK(graph_density(parse_instance(kTriangle)) == 1.0);
  auto sparse = parse_instance(R"({"problem_class":"maxcut","nodes":3,"edges":[[0,1]]})");
  CHECK(graph_density(sparse) == doctest::Approx(1.0 / 3.0));

  // 60 nodes with 708 edges is the 0.4 demonstration regime
  json edges = json::array();
  std::size_t count = 0;
  for (std::size_t u = 0; u < 60 && count < 708; ++u)
    for (std::size_t v = u + 1; v < 60 && count < 708; ++v, ++count)
      edges.push_back(json::array({u, v, 1.0}));
  auto big = parse_instance(json{{"problem_class", "maxcut"}, {"nodes", 60}, {"edges", edges}});
  CHECK(graph_density(big) == doctest::Approx(0.4).epsilon(1e-15));

  CHECK(test::code_of([] {
          graph_density(parse_instance(R"({"problem_class":"qubo","matrix":[[1]]})"));
        }) == ErrorCode::NotGraphBased);
}

TEST_CASE("maxcut: cut(x) = constant - Q(x) with one instance-wide constant") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 2 + seed % 7;
    auto inst = random_maxcut(n, 0.3 + 0.7 * static_cast<double>(seed % 4) / 3.0, seed);
    Formulation f = formulate_problem(inst);
    double constant = NAN;
    for (std::uint64_t idx = 0; idx < (1ULL << n); ++idx) {
      Bitstring x = bits_from_index(idx, n);
      double c = evaluate_solution(inst, x).objective_value + qubo_objective(f.qubo, x);
      if (idx == 0) constant = c;
      CHECK(c == doctest::Approx(constant).epsilon(1e-12));
    }
    CHECK(constant == doctest::Approx(0.0));
  }
}

TEST_CASE("maxcut normalized mode rescales by a power of two") {
  auto inst = parse_instance(
      R"({"problem_class":"maxcut","nodes":3,"edges":[[0,1,3.0],[1,2,0.5]]})");
  Formulation f = formulate_problem(inst, "normalized");
  CHECK(f.scale == -4.0);
  CHECK(f.qubo.at(0, 1) == 1.5);
}

TEST_CASE("knapsack slack encodings reproduce value on feasible assignments") {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto inst = random_knapsack(2 + seed % 4, 0.3 + 0.1 * static_cast<double>(seed % 5), seed);
    const std::size_t n = variable_count(inst);
    for (const char* mode : {"binary_slack", "unary_slack"}) {
      Formulation f = formulate_problem(inst, mode);
      if (f.qubo.size() > 22) continue;
      const double penalty = inst.payload["penalty"].get<double>();
      for (std::uint64_t idx = 0; idx < (1ULL << n); ++idx) {
        Bitstring x = bits_from_index(idx, n);
        auto report = evaluate_solution(inst, x);
        double lifted = f.offset + f.scale * min_over_aux(f, x);
        if (report.feasible) {
          CHECK(lifted == report.objective_value);
        } else {
          CHECK(lifted <= report.objective_value - penalty);
        }
      }
    }
  }
}
