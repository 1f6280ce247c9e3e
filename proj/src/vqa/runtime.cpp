#include "qdt/vqa/runtime.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "qdt/common/error.hpp"

namespace qdt::vqa {

namespace {

constexpr std::uint64_t kSaltInit = 1, kSaltOptimizer = 2, kSaltNoise = 3, kSaltReadout = 4,
                        kSaltCalls = 5;

json params_json(const Params& p) { return json(p); }

}  // namespace

json VqaTrace::to_json(bool with_history) const {
  json out{{"status", status},
           {"n_calls", n_calls},
           {"circuit_calls", circuit_calls},
           {"shots_per_call", shots_per_call},
           {"best_params", params_json(best_params)},
           {"best_loss", best_loss},
           {"best_bitstring", problem::to_string(best_bitstring)},
           {"final_params", params_json(final_params)}};
  if (with_history) {
    json h = json::array();
    for (const HistoryEntry& e : history)
      h.push_back(json{{"params", params_json(e.params)}, {"loss", e.loss}, {"circuit_calls", e.circuit_calls}});
    out["history"] = std::move(h);
  }
  return out;
}

LossFn inject_noise_loss(const problem::QuboMatrix& q, LossFn exact, double epsilon, std::uint64_t seed) {
  if (epsilon < 0.0 || std::isnan(epsilon)) fail(ErrorCode::NegativeEpsilon, "noise level must be nonnegative");
  if (epsilon == 0.0) return exact;
  auto rng = std::make_shared<std::mt19937_64>(seed);
  const double sigma = epsilon * problem::uniform_loss_stddev(q);
  return [exact = std::move(exact), rng, sigma](const Params& p) {
    std::normal_distribution<double> noise(0.0, sigma);
    return exact(p) + noise(*rng);
  };
}

double exact_loss(const ParametricCircuit& pc, const problem::QuboMatrix& q, const Params& theta) {
  return quantum::exact_expectation(pc.bind(theta), q);
}

Params parameter_shift_gradient(const ParametricCircuit& pc, const Params& theta,
                                const std::function<double(const quantum::Circuit&)>& evaluate) {
  Params g(pc.n_params(), 0.0);
  const double s = std::numbers::pi / 2.0;
  for (std::size_t i = 0; i < pc.gates().size(); ++i) {
    const ParamGate& pg = pc.gates()[i];
    if (pg.param < 0 || pg.coeff == 0.0) continue;
    const double up = evaluate(pc.bind_shifted(theta, i, s));
    const double down = evaluate(pc.bind_shifted(theta, i, -s));
    g[static_cast<std::size_t>(pg.param)] += pg.coeff * 0.5 * (up - down);
  }
  return g;
}

Params initial_parameters(const AnsatzSpec& spec, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double half = spec.kind == AnsatzKind::HardwareEfficient ? std::numbers::pi : std::numbers::pi / 4.0;
  std::uniform_real_distribution<double> u(-half, half);
  Params p(spec.parameter_count(n));
  for (double& v : p) v = u(rng);
  return p;
}

double optimality_gap(double value, double optimum) {
  const double scale = std::abs(optimum);
  return scale > 0.0 ? (value - optimum) / scale : value - optimum;
}

double shot_stddev(const std::vector<double>& probs, const std::vector<double>& energies) {
  const double mean = quantum::expectation_from_probabilities(probs, energies);
  double var = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) var += probs[i] * (energies[i] - mean) * (energies[i] - mean);
  return std::sqrt(var);
}

VqaTrace run_vqa(const VqaConfig& cfg, const problem::QuboMatrix& q) {
  if (cfg.budget == 0) fail(ErrorCode::OutOfRange, "budget must be at least 1");
  const ParametricCircuit pc = make_template(cfg.ansatz, q);
  if (pc.n_params() > 0 && !cfg.optimizer)
    fail(ErrorCode::OptimizerFailure, "ansatz has free parameters but no optimizer was given");
  std::shared_ptr<quantum::Backend> backend = cfg.backend;
  if (!backend) backend = std::make_shared<quantum::LocalSimulator>();

  const std::vector<double> energies = problem::qubo_energies(q);
  const bool exact_mode = cfg.n_shots == kExactShots;

  VqaTrace trace;
  trace.shots_per_call = cfg.n_shots;
  std::uint64_t calls = 0;
  double last_exact = 0.0;

  // noise-free value of a circuit; remembered for the history entry
  auto exact_value = [&](const quantum::Circuit& c) {
    return quantum::expectation_from_probabilities(backend->probabilities(c), energies);
  };
  auto shot_value = [&](const quantum::Circuit& c) {
    auto shots = backend->run(c, cfg.n_shots, mix_seed(cfg.seed, kSaltCalls + calls));
    return quantum::estimate_expectation(shots, q);
  };

  const quantum::Circuit* pending = nullptr;
  LossFn circuit_loss = [&](const Params&) {
    if (exact_mode) {
      last_exact = exact_value(*pending);
      return last_exact;
    }
    last_exact = std::numeric_limits<double>::quiet_NaN();
    return shot_value(*pending);
  };
  LossFn noisy = inject_noise_loss(q, circuit_loss, cfg.noise_epsilon, mix_seed(cfg.seed, kSaltNoise));

  auto evaluate = [&](const quantum::Circuit& c) {
    if (calls >= cfg.budget) throw BudgetExhausted{};
    ++calls;
    pending = &c;
    const double v = noisy(Params{});
    pending = nullptr;
    return v;
  };

  Objective obj;
  obj.dim = pc.n_params();
  obj.frequencies = pc.frequencies();
  obj.loss = [&](const Params& theta) {
    const quantum::Circuit c = pc.bind(theta);
    const double v = evaluate(c);
    trace.history.push_back({theta, v, last_exact, calls});
    return v;
  };
  obj.gradient = [&](const Params& theta) { return parameter_shift_gradient(pc, theta, evaluate); };
  obj.iterate = [&](const Params& theta) { trace.final_params = theta; };

  Params x0 = cfg.initial_params.value_or(initial_parameters(cfg.ansatz, q.size(), mix_seed(cfg.seed, kSaltInit)));
  if (x0.size() != pc.n_params())
    fail(ErrorCode::ParamCountMismatch, "initial parameters have the wrong length");
  trace.final_params = x0;
  trace.status = "completed";
  try {
    if (pc.n_params() == 0) {
      obj.loss(x0);
    } else {
      cfg.optimizer->minimize(obj, x0, mix_seed(cfg.seed, kSaltOptimizer));
    }
  } catch (const BudgetExhausted&) {
    trace.status = "budget_exhausted";
  }

  trace.n_calls = trace.history.size();
  trace.circuit_calls = calls;
  if (trace.history.empty()) {
    trace.best_params = x0;
    trace.best_loss = std::numeric_limits<double>::quiet_NaN();
  } else {
    const HistoryEntry* best = &trace.history.front();
    for (const HistoryEntry& e : trace.history)
      if (e.loss < best->loss) best = &e;
    trace.best_params = best->params;
    trace.best_loss = best->loss;
  }

  if (!cfg.skip_readout) {
    const quantum::Circuit c = pc.bind(trace.best_params);
    const std::uint64_t shots = exact_mode ? kReadoutShots : cfg.n_shots;
    auto readout = backend->run(c, shots, mix_seed(cfg.seed, kSaltReadout));
    std::uint64_t pick = readout.mode();
    if (exact_mode) {
      for (const auto& [idx, n] : readout.counts)
        if (energies[idx] < energies[pick]) pick = idx;
    }
    trace.best_bitstring = problem::bits_from_index(pick, q.size());
  }
  return trace;
}

}  // namespace qdt::vqa
