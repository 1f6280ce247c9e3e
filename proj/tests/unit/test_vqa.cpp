#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qdt/vqa/runtime.hpp"

using namespace qdt;
using namespace qdt::vqa;
using problem::QuboMatrix;
using quantum::GateKind;

namespace {

/// QAOA state built directly: uniform superposition, diagonal phase
/// exp(-i gamma Q(x)) and per-qubit exp(-i beta X).
std::vector<std::complex<double>> qaoa_oracle(const QuboMatrix& q, const Params& gammas, const Params& betas) {
  const std::size_t n = q.size(), dim = std::size_t{1} << n;
  auto dense = test::to_dense(q);
  std::vector<std::complex<double>> psi(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    for (std::size_t idx = 0; idx < dim; ++idx) {
      std::vector<std::uint8_t> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = (idx >> i) & 1U;
      psi[idx] *= std::exp(std::complex<double>(0, -gammas[k] * test::dense_objective(dense, x)));
    }
    const std::complex<double> c = std::cos(betas[k]), s{0, -std::sin(betas[k])};
    for (std::size_t qb = 0; qb < n; ++qb) {
      const std::size_t bit = std::size_t{1} << qb;
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        auto a = psi[i], b = psi[i | bit];
        psi[i] = c * a + s * b;
        psi[i | bit] = s * a + c * b;
      }
    }
  }
  return psi;
}

double overlap(const quantum::StateVector& a, const std::vector<std::complex<double>>& b) {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return std::abs(s);
}

}  // namespace

TEST_CASE("qaoa circuit structure") {
  QuboMatrix q({{0, 1}, {0, 0}});
  CHECK(test::code_of([&] { build_qaoa_circuit(q, {}, {}); }) == ErrorCode::EmptySchedule);
  auto c = build_qaoa_circuit(q, {0.3}, {0.2});
  CHECK(c.count(GateKind::RZZ) == 1);
  CHECK(c.count(GateKind::H) == 2);
  CHECK(c.count(GateKind::RX) == 2);

  QuboMatrix diag({{1, 0, 0}, {0, -2, 0}, {0, 0, 3}});
  for (std::size_t p = 1; p <= 4; ++p) {
    Params g(p, 0.4), b(p, 0.1);
    CHECK(build_qaoa_circuit(diag, g, b).count(GateKind::RZZ) == 0);
  }
  CHECK(test::code_of([&] { build_qaoa_circuit(q, {0.1, 0.2}, {0.1}); }) == ErrorCode::ParamCountMismatch);
}

TEST_CASE("qaoa circuit equals the phase-separator oracle up to global phase") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 2 + seed % 3, p = 1 + seed % 3;
    QuboMatrix q = problem::random_qubo(n, 0.7, seed);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    Params g(p), b(p);
    for (auto& v : g) v = u(rng);
    for (auto& v : b) v = u(rng);
    auto state = quantum::simulate_statevector(build_qaoa_circuit(q, g, b));
    CHECK(overlap(state, qaoa_oracle(q, g, b)) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("qaoa at zero angles gives the uniform mean") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    QuboMatrix q = problem::random_qubo(1 + seed % 5, 0.8, seed);
    auto [mean, sd] = test::enumerate_moments(test::to_dense(q));
    CHECK(quantum::exact_expectation(build_qaoa_circuit(q, {0.0}, {0.0}), q) ==
          doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("linear ramp schedule") {
  auto [g1, b1] = lr_qaoa_schedule(1, 1.0);
  CHECK(g1 == Params{1.0});
  CHECK(b1 == Params{0.0});
  auto [g2, b2] = lr_qaoa_schedule(2, 0.8);
  CHECK(g2[0] == doctest::Approx(0.4));
  CHECK(g2[1] == doctest::Approx(0.8));
  CHECK(b2[0] == doctest::Approx(0.4));
  CHECK(b2[1] == doctest::Approx(0.0));
  CHECK(test::code_of([] { lr_qaoa_schedule(3, 0.0); }) == ErrorCode::InvalidDelta);
  CHECK(test::code_of([] { lr_qaoa_schedule(0, 0.5); }) == ErrorCode::EmptySchedule);
  auto [g8, b8] = lr_qaoa_schedule(8, 0.7);
  for (std::size_t k = 1; k < 8; ++k) {
    CHECK(g8[k] > g8[k - 1]);
    CHECK(b8[k] < b8[k - 1]);
  }
}

TEST_CASE("hardware-efficient ansatz") {
  auto zero = quantum::simulate_statevector(build_hea_circuit(2, 1, {0.0, 0.0}));
  CHECK(std::norm(zero[0]) == doctest::Approx(1.0));

  // RY(pi) on qubit 0 prepares x = "10"; the CX chain then copies it to qubit 1
  quantum::Circuit pre(2);
  pre.ry(0, std::numbers::pi);
  CHECK(std::norm(quantum::simulate_statevector(pre)[1]) == doctest::Approx(1.0));
  auto flipped = quantum::simulate_statevector(build_hea_circuit(2, 1, {std::numbers::pi, 0.0}));
  CHECK(std::norm(flipped[3]) == doctest::Approx(1.0));

  CHECK(test::code_of([] { build_hea_circuit(2, 1, {0.0}); }) == ErrorCode::ParamCountMismatch);
  auto c = build_hea_circuit(4, 3, Params(12, 0.1));
  CHECK(c.count(GateKind::RY) == 12);
  CHECK(c.count(GateKind::CX) == 9);
}

TEST_CASE("declared-only ansatz kinds are not constructible") {
  QuboMatrix q({{1, 0}, {0, 1}});
  for (auto kind : {AnsatzKind::MaQaoa, AnsatzKind::QaoaPlus, AnsatzKind::DcQaoa, AnsatzKind::WsQaoa}) {
    CHECK(test::code_of([&] { make_template(AnsatzSpec{kind, 1, 0.7}, q); }) == ErrorCode::Unimplemented);
    CHECK(ansatz_kind_from_string(to_string(kind)) == kind);
  }
}

TEST_CASE("parameter-shift gradient matches central finite differences") {
  const double h = 1e-4;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::size_t n = 2 + seed % 3;
    QuboMatrix q = problem::random_qubo(n, 0.8, seed + 40);
    AnsatzSpec spec = seed % 2 ? AnsatzSpec{AnsatzKind::Qaoa, 2, 0.7}
                               : AnsatzSpec{AnsatzKind::HardwareEfficient, 2, 0.7};
    ParametricCircuit pc = make_template(spec, q);
    Params theta = initial_parameters(spec, n, seed);
    Params g = parameter_shift_gradient(pc, theta, [&](const quantum::Circuit& c) {
      return quantum::exact_expectation(c, q);
    });
    for (std::size_t k = 0; k < theta.size(); ++k) {
      Params up = theta, down = theta;
      up[k] += h;
      down[k] -= h;
      const double fd = (exact_loss(pc, q, up) - exact_loss(pc, q, down)) / (2 * h);
      CHECK(std::abs(g[k] - fd) <= 1e-4);
    }
  }
}

TEST_CASE("noise injection") {
  QuboMatrix q({{1, 0}, {0, 1}});
  CHECK(problem::uniform_loss_stddev(q) == doctest::Approx(1.0 / std::sqrt(2.0)));
  LossFn exact = [](const Params& p) { return 0.25 + p[0]; };
  LossFn same = inject_noise_loss(q, exact, 0.0, 1);
  for (double x : {0.0, 0.1, -3.0}) CHECK(same({x}) == exact({x}));
  CHECK(test::code_of([&] { inject_noise_loss(q, exact, -0.1, 1); }) == ErrorCode::NegativeEpsilon);

  LossFn noisy = inject_noise_loss(q, exact, 0.1, 7);
  double sum = 0.0, sq = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const double v = noisy({0.5});
    sum += v;
    sq += v * v;
  }
  const double mean = sum / draws;
  const double sd = std::sqrt((sq - draws * mean * mean) / (draws - 1));
  CHECK(std::abs(sd - 0.1 / std::sqrt(2.0)) <= 0.05 * 0.1 / std::sqrt(2.0));
}

TEST_CASE("lr_qaoa performs exactly one call") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    QuboMatrix q = problem::random_qubo(3 + seed % 3, 0.6, seed);
    VqaConfig cfg;
    cfg.ansatz = {AnsatzKind::LrQaoa, 4, 0.7};
    cfg.budget = 50;
    cfg.seed = seed;
    auto trace = run_vqa(cfg, q);
    CHECK(trace.n_calls == 1);
    CHECK(trace.circuit_calls == 1);
    CHECK(trace.status == "completed");
    CHECK(trace.best_bitstring.size() == q.size());
  }
}

TEST_CASE("trace bookkeeping") {
  QuboMatrix q = problem::random_qubo(4, 0.8, 3);
  for (auto opt : {make_spsa(), make_nft(), make_ps_gd(), make_powell()}) {
    VqaConfig cfg;
    cfg.ansatz = {AnsatzKind::Qaoa, 2, 0.7};
    cfg.optimizer = opt;
    cfg.budget = 120;
    cfg.n_shots = 64;
    cfg.seed = 11;
    auto trace = run_vqa(cfg, q);
    CAPTURE(opt->name());
    CHECK(trace.n_calls == trace.history.size());
    CHECK(trace.circuit_calls <= cfg.budget);
    CHECK(trace.n_calls <= trace.circuit_calls);
    double m = INFINITY;
    for (const auto& e : trace.history) m = std::min(m, e.loss);
    CHECK(trace.best_loss == m);
    CHECK(trace.status == "budget_exhausted");
    CHECK(trace.final_params.size() == 4);
    auto doc = trace.to_json();
    CHECK(doc["n_calls"] == trace.n_calls);
    CHECK(doc["best_bitstring"].get<std::string>().size() == 4);
  }
}

TEST_CASE("single-shot losses still give a valid trace") {
  QuboMatrix q = problem::random_qubo(4, 0.8, 5);
  VqaConfig cfg;
  cfg.ansatz = {AnsatzKind::HardwareEfficient, 1, 0.7};
  cfg.optimizer = make_spsa();
  cfg.n_shots = 1;
  cfg.budget = 40;
  auto trace = run_vqa(cfg, q);
  CHECK(trace.n_calls <= 40);
  CHECK(trace.n_calls > 0);
  CHECK(std::isfinite(trace.best_loss));
}

TEST_CASE("doubling the budget never worsens best_loss") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    QuboMatrix q = problem::random_qubo(4, 0.7, seed + 100);
    double previous = INFINITY;
    for (std::uint64_t budget : {25, 50, 100, 200, 400}) {
      VqaConfig cfg;
      cfg.ansatz = {AnsatzKind::HardwareEfficient, 2, 0.7};
      cfg.optimizer = seed % 2 ? make_nft() : make_spsa();
      cfg.n_shots = 128;
      cfg.budget = budget;
      cfg.seed = seed;
      cfg.skip_readout = true;
      const double best = run_vqa(cfg, q).best_loss;
      CHECK(best <= previous);
      previous = best;
    }
  }
}

TEST_CASE("spsa in exact mode reaches a 5% gap on most small instances") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    QuboMatrix q = problem::random_qubo(4, 1.0, seed);
    VqaConfig cfg;
    cfg.ansatz = {AnsatzKind::HardwareEfficient, 2, 0.7};
    cfg.optimizer = make_spsa();
    cfg.budget = 300;
    cfg.seed = seed;
    auto trace = run_vqa(cfg, q);
    const double opt = problem::brute_force_optimum(q).value;
    hits += optimality_gap(trace.best_loss, opt) <= 0.05;
  }
  CHECK(hits >= 7);
}

TEST_CASE("best_loss spread shrinks as shots grow") {
  // deterministic optimizer and start point: the spread comes from sampling only
  QuboMatrix q = problem::random_qubo(4, 1.0, 77);
  double previous = INFINITY;
  for (std::uint64_t shots : {10, 100, 1000}) {
    std::vector<double> best;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      VqaConfig cfg;
      cfg.ansatz = {AnsatzKind::HardwareEfficient, 2, 0.7};
      cfg.optimizer = make_nft();
      cfg.n_shots = shots;
      cfg.budget = 100;
      cfg.seed = seed;
      cfg.initial_params = Params(8, 1.2);
      cfg.skip_readout = true;
      best.push_back(run_vqa(cfg, q).best_loss);
    }
    double m = 0.0, v = 0.0;
    for (double b : best) m += b;
    m /= best.size();
    for (double b : best) v += (b - m) * (b - m);
    v /= best.size() - 1;
    CHECK(v <= previous);
    previous = v;
  }
}

TEST_CASE("nft lands on the minimum of a single sinusoid in one step") {
  // one qubit, RY(theta): loss = -sin^2(theta / 2), minimum at theta = pi
  QuboMatrix q({{-1.0}});
  VqaConfig cfg;
  cfg.ansatz = {AnsatzKind::HardwareEfficient, 1, 0.7};
  cfg.optimizer = make_nft(1);
  cfg.initial_params = Params{0.4};
  cfg.budget = 3;
  auto trace = run_vqa(cfg, q);
  CHECK(std::abs(std::abs(trace.final_params[0]) - std::numbers::pi) < 1e-9);
  CHECK(exact_loss(make_template(cfg.ansatz, q), q, trace.final_params) == doctest::Approx(-1.0));
  CHECK(trace.best_bitstring == problem::Bitstring{1});
}
