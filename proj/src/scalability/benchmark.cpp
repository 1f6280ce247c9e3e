#include "qdt/scalability/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "qdt/builders/builders.hpp"
#include "qdt/common/error.hpp"
#include "qdt/problem/problem.hpp"
#include "qdt/quantum/simulator.hpp"
#include "qdt/vqa/runtime.hpp"

namespace qdt::scalability {

namespace {

std::size_t argmax(const std::vector<double>& p) {
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::string today_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%d");
  return out.str();
}

// salts separating the seed streams of one cell
constexpr std::uint64_t kSaltCurve = 1;
constexpr std::uint64_t kSaltCalls = 2;
constexpr std::uint64_t kSaltKappa = 3;

}  // namespace

vqa::AnsatzSpec TrialSetup::ansatz() const {
  return builders::BuilderRegistry::global().build_ansatz(ansatz_id, ansatz_values);
}

TrialOutcome run_trial(const TrialSetup& setup, const problem::QuboMatrix& q, double epsilon, std::uint64_t seed,
                       bool track_calls) {
  const auto& reg = builders::BuilderRegistry::global();
  vqa::VqaConfig cfg;
  cfg.ansatz = setup.ansatz();
  cfg.optimizer = reg.build_optimizer(setup.optimizer_id, setup.optimizer_values);
  cfg.budget = setup.budget;
  cfg.seed = seed;
  cfg.noise_epsilon = epsilon;
  cfg.skip_readout = true;
  const vqa::VqaTrace trace = vqa::run_vqa(cfg, q);

  const problem::Optimum opt = problem::brute_force_optimum(q);
  const std::vector<double> energies = problem::qubo_energies(q);
  const vqa::ParametricCircuit pc = vqa::make_template(cfg.ansatz, q);
  auto gap_at = [&](const vqa::Params& theta) {
    const auto probs = quantum::probabilities(quantum::simulate_statevector(pc.bind(theta)));
    return vqa::optimality_gap(energies[argmax(probs)], opt.value);
  };

  TrialOutcome out;
  out.circuit_calls = trace.circuit_calls;
  out.gap = gap_at(trace.final_params);
  out.success = out.gap <= setup.delta;
  if (track_calls && out.success) {
    for (const auto& h : trace.history) {
      if (gap_at(h.params) <= setup.delta) {
        out.calls_to_solution = h.circuit_calls;
        break;
      }
    }
    // reached only through the final iterate bookkeeping
    if (!out.calls_to_solution) out.calls_to_solution = trace.circuit_calls;
  }
  return out;
}

InstanceFamily instance_family(const std::string& problem_type, double density) {
  if (problem_type == "maxcut")
    return [density](std::size_t n, std::uint64_t seed) {
      return problem::formulate_problem(problem::random_maxcut(n, density, seed)).qubo;
    };
  if (problem_type == "random_qubo")
    return [density](std::size_t n, std::uint64_t seed) { return problem::random_qubo(n, density, seed); };
  if (problem_type == "knapsack")
    return [density](std::size_t n, std::uint64_t seed) {
      return problem::formulate_problem(problem::random_knapsack(n, density, seed)).qubo;
    };
  fail(ErrorCode::UnknownProblemClass, "no benchmark family for problem type '" + problem_type + "'");
}

double measure_success_rate(const TrialSetup& setup, const InstanceFamily& family, std::size_t n, double epsilon,
                            std::size_t trials, std::uint64_t seed, std::vector<double>* calls) {
  if (trials == 0) fail(ErrorCode::OutOfRange, "trials must be at least 1");
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t ts = mix_seed(seed, t);
    const problem::QuboMatrix q = family(n, mix_seed(ts, 0));
    const TrialOutcome o = run_trial(setup, q, epsilon, mix_seed(ts, 1), calls != nullptr);
    if (!o.success) continue;
    ++hits;
    if (calls && o.calls_to_solution) calls->push_back(static_cast<double>(*o.calls_to_solution));
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

double chance_success_rate(const InstanceFamily& family, std::size_t n, std::size_t trials, std::uint64_t seed,
                           double delta) {
  if (trials == 0) fail(ErrorCode::OutOfRange, "trials must be at least 1");
  double sum = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const problem::QuboMatrix q = family(n, mix_seed(mix_seed(seed, t), 0));
    const double opt = problem::brute_force_optimum(q).value;
    const std::vector<double> e = problem::qubo_energies(q);
    std::size_t good = 0;
    for (double v : e) good += vqa::optimality_gap(v, opt) <= delta;
    sum += static_cast<double>(good) / static_cast<double>(e.size());
  }
  return sum / static_cast<double>(trials);
}

double estimator_stddev(const quantum::Circuit& circuit, const problem::QuboMatrix& q, std::uint64_t n_shots,
                        std::size_t repetitions, std::uint64_t seed) {
  if (repetitions < 2) fail(ErrorCode::OutOfRange, "need at least 2 repetitions for a spread");
  const auto probs = quantum::probabilities(quantum::simulate_statevector(circuit));
  std::vector<double> est(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r)
    est[r] = quantum::estimate_expectation(
        quantum::sample_probabilities(probs, circuit.n_qubits(), n_shots, mix_seed(seed, r)), q);
  double mean = 0;
  for (double v : est) mean += v;
  mean /= static_cast<double>(repetitions);
  double var = 0;
  for (double v : est) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(repetitions - 1));
}

double empirical_kappa(const quantum::Circuit& circuit, const problem::QuboMatrix& q, std::uint64_t n_shots,
                       std::size_t repetitions, std::uint64_t seed) {
  const double sigma_u = problem::uniform_loss_stddev(q);
  if (!(sigma_u > 0)) fail(ErrorCode::InvalidMatrix, "kappa needs a nonconstant objective");
  return estimator_stddev(circuit, q, n_shots, repetitions, seed) * std::sqrt(static_cast<double>(n_shots)) /
         sigma_u;
}

json KappaSettings::to_json() const {
  return json{{"shots", n_shots}, {"repetitions", repetitions}, {"probes", probes}, {"points", points}};
}

KappaSettings KappaSettings::from_json(const json& doc) {
  KappaSettings k;
  for (const auto& [key, v] : doc.items()) {
    if (key == "shots") k.n_shots = v.get<std::uint64_t>();
    else if (key == "repetitions") k.repetitions = v.get<std::size_t>();
    else if (key == "probes") k.probes = v.get<std::size_t>();
    else if (key == "points") k.points = v.get<std::size_t>();
    else fail(ErrorCode::InvalidConfig, "unknown kappa setting '" + key + "'");
  }
  if (k.n_shots == 0 || k.repetitions < 2 || k.probes == 0 || k.points == 0)
    fail(ErrorCode::InvalidConfig, "kappa settings must be positive (repetitions at least 2)");
  return k;
}

KappaFit finite_sampling_coefficient(const TrialSetup& setup, const InstanceFamily& family,
                                     const std::vector<std::size_t>& sizes, const KappaSettings& settings,
                                     std::uint64_t seed, std::vector<std::pair<double, double>>* samples) {
  if (sizes.empty() || settings.probes == 0) fail(ErrorCode::OutOfRange, "probe set is empty");
  const auto& reg = builders::BuilderRegistry::global();
  std::vector<std::pair<double, double>> pts;
  for (std::size_t n : sizes) {
    for (std::size_t p = 0; p < settings.probes; ++p) {
      const std::uint64_t ps = mix_seed(mix_seed(seed, n), p);
      const problem::QuboMatrix q = family(n, mix_seed(ps, 0));
      vqa::VqaConfig cfg;
      cfg.ansatz = setup.ansatz();
      cfg.optimizer = reg.build_optimizer(setup.optimizer_id, setup.optimizer_values);
      cfg.budget = setup.budget;
      cfg.seed = mix_seed(ps, 1);
      cfg.skip_readout = true;
      const vqa::VqaTrace trace = vqa::run_vqa(cfg, q);
      const vqa::ParametricCircuit pc = vqa::make_template(cfg.ansatz, q);
      const std::size_t h = trace.history.size();
      std::set<std::size_t> picks;
      for (std::size_t k = 0; k < settings.points && h > 0; ++k)
        picks.insert(settings.points == 1 ? h - 1 : (k * (h - 1) + (settings.points - 1) / 2) / (settings.points - 1));
      std::size_t j = 0;
      for (std::size_t idx : picks) {
        const double kap = empirical_kappa(pc.bind(trace.history[idx].params), q, settings.n_shots,
                                           settings.repetitions, mix_seed(ps, 10 + j++));
        pts.emplace_back(static_cast<double>(n), kap);
      }
    }
  }
  if (samples) *samples = pts;
  // Late iterates near a basis state give kappa ~ 0 and early ones ~ 1, so
  // each size contributes the RMS over its points (the mean shot variance
  // along the trajectory) rather than every raw sample.
  std::vector<std::pair<double, double>> rms;
  for (std::size_t n : sizes) {
    double sum = 0;
    std::size_t count = 0;
    for (const auto& [pn, v] : pts)
      if (pn == static_cast<double>(n)) {
        sum += v * v;
        ++count;
      }
    if (count) rms.emplace_back(static_cast<double>(n), std::sqrt(sum / static_cast<double>(count)));
  }
  return fit_kappa(rms);
}

BuildPlan BuildPlan::from_json(const json& doc) {
  if (!doc.is_object()) fail(ErrorCode::InvalidConfig, "build plan must be a map");
  const auto& reg = builders::BuilderRegistry::global();
  BuildPlan p;
  bool have_noise = false;
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "seed") {
        p.seed = v.get<std::uint64_t>();
      } else if (key == "problem_types") {
        p.problem_types = v.get<std::vector<std::string>>();
      } else if (key == "densities") {
        p.densities = v.get<std::vector<double>>();
      } else if (key == "vqas") {
        for (const auto& e : v) {
          Vqa q{e.at("id").get<std::string>(), e.at("ansatz").get<std::string>(), e.value("values", json::object())};
          q.values = reg.complete_values(q.ansatz, q.values);
          p.vqas.push_back(std::move(q));
        }
      } else if (key == "optimizers") {
        for (const auto& e : v) {
          Optimizer o{e.at("id").get<std::string>(), e.value("values", json::object())};
          o.values = reg.complete_values(o.id, o.values);
          p.optimizers.push_back(std::move(o));
        }
      } else if (key == "sizes") {
        p.n_min = v.at("min").get<std::size_t>();
        p.n_max = v.at("max").get<std::size_t>();
      } else if (key == "noise") {
        const double lo = v.at("min").get<double>(), hi = v.at("max").get<double>();
        const std::size_t count = v.at("count").get<std::size_t>();
        if (!(lo > 0) || !(hi > lo) || count < 2) fail(ErrorCode::InvalidConfig, "noise grid needs 0 < min < max, count >= 2");
        p.epsilons.clear();
        for (std::size_t k = 0; k < count; ++k)
          p.epsilons.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(count - 1)));
        have_noise = true;
      } else if (key == "epsilons") {
        p.epsilons = v.get<std::vector<double>>();
        have_noise = true;
      } else if (key == "trials") {
        p.trials = v.get<std::size_t>();
      } else if (key == "budget") {
        p.budget = v.get<std::uint64_t>();
      } else if (key == "delta") {
        p.delta = v.get<double>();
      } else if (key == "kappa") {
        p.kappa = KappaSettings::from_json(v);
      } else {
        fail(ErrorCode::InvalidConfig, "unknown build plan key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("malformed build plan: ") + e.what());
  }
  if (p.problem_types.empty() || p.densities.empty() || p.vqas.empty() || p.optimizers.empty())
    fail(ErrorCode::InvalidConfig, "build plan needs problem_types, densities, vqas and optimizers");
  if (!have_noise) fail(ErrorCode::InvalidConfig, "build plan needs 'noise' or 'epsilons'");
  if (p.n_min < 2 || p.n_max < p.n_min || p.n_max > problem::kBruteForceCap)
    fail(ErrorCode::InvalidConfig, "sizes must satisfy 2 <= min <= max <= 20");
  if (p.trials == 0 || p.budget == 0) fail(ErrorCode::InvalidConfig, "trials and budget must be positive");
  if (!(p.delta >= 0)) fail(ErrorCode::InvalidConfig, "delta must be nonnegative");
  for (const auto& t : p.problem_types) instance_family(t, 0.5);
  return p;
}

BuildPlan BuildPlan::from_yaml_file(const std::filesystem::path& path) { return from_json(load_yaml_file(path)); }

json BuildPlan::to_json() const {
  json v = json::array(), o = json::array();
  for (const auto& q : vqas) v.push_back(json{{"id", q.id}, {"ansatz", q.ansatz}, {"values", q.values}});
  for (const auto& q : optimizers) o.push_back(json{{"id", q.id}, {"values", q.values}});
  return json{{"seed", seed},
              {"problem_types", problem_types},
              {"densities", densities},
              {"vqas", v},
              {"optimizers", o},
              {"sizes", {{"min", n_min}, {"max", n_max}}},
              {"epsilons", epsilons},
              {"trials", trials},
              {"budget", budget},
              {"delta", delta},
              {"kappa", kappa.to_json()}};
}

std::string BuildPlan::hash() const { return hex64(fnv1a64(to_json().dump())); }

std::size_t BuildPlan::cell_count() const {
  return problem_types.size() * densities.size() * vqas.size() * optimizers.size();
}

std::vector<ScalingRecord> build_cell(const BuildPlan& plan, std::size_t index, const Provenance& provenance) {
  if (index >= plan.cell_count()) fail(ErrorCode::OutOfRange, "cell index out of range");
  std::size_t rest = index;
  const auto& opt = plan.optimizers[rest % plan.optimizers.size()];
  rest /= plan.optimizers.size();
  const auto& vq = plan.vqas[rest % plan.vqas.size()];
  rest /= plan.vqas.size();
  const double density = plan.densities[rest % plan.densities.size()];
  rest /= plan.densities.size();
  const std::string& type = plan.problem_types[rest];

  ScalingRecord base;
  base.problem_type = type;
  base.density = density;
  base.vqa = vq.id;
  base.optimizer = opt.id;
  base.benchmark.ansatz = json{{"id", vq.ansatz}, {"values", vq.values}};
  base.benchmark.optimizer = json{{"id", opt.id}, {"values", opt.values}};
  base.benchmark.budget = plan.budget;
  base.benchmark.delta = plan.delta;
  base.provenance = provenance;
  base.calls.c = static_cast<double>(plan.budget);

  std::vector<ScalingRecord> out;
  auto emit_all_invalid = [&](const std::string& note) {
    out.clear();
    for (Hypothesis h : kHypotheses) {
      ScalingRecord r = base;
      r.fit = ScalingFit{};
      r.fit.hypothesis = h;
      r.fit.n_min = plan.n_min;
      r.fit.n_max = plan.n_max;
      r.note = note;
      out.push_back(std::move(r));
    }
  };

  try {
    TrialSetup setup{vq.ansatz, vq.values, opt.id, opt.values, plan.budget, plan.delta};
    const InstanceFamily family = instance_family(type, density);
    const std::uint64_t cell_seed = mix_seed(plan.seed, index);

    std::vector<ThresholdPoint> ok;
    for (std::size_t n = plan.n_min; n <= plan.n_max; ++n) {
      std::vector<SuccessSample> curve;
      const std::uint64_t ns = mix_seed(mix_seed(cell_seed, kSaltCurve), n);
      for (double eps : plan.epsilons)
        curve.push_back({eps, measure_success_rate(setup, family, n, eps, plan.trials, ns)});
      ThresholdPoint tp;
      tp.n = n;
      tp.trials = plan.trials;
      tp.success_curve = curve;
      try {
        tp = fit_threshold(n, plan.trials, curve);
        ok.push_back(tp);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NoCrossing) tp.status = "no_crossing";
        else if (e.code() == ErrorCode::NeverSucceeds) tp.status = "never_succeeds";
        else throw;
        if (tp.status == "never_succeeds") ++base.never_succeeds_sizes;
      }
      base.thresholds.push_back(tp);
    }

    std::vector<std::size_t> sizes;
    for (std::size_t n = plan.n_min; n <= plan.n_max; ++n) sizes.push_back(n);
    base.kappa = finite_sampling_coefficient(setup, family, sizes, plan.kappa, mix_seed(cell_seed, kSaltKappa));

    std::vector<std::pair<double, double>> calls;
    for (const auto& tp : ok) {
      std::vector<double> c;
      measure_success_rate(setup, family, tp.n, tp.epsilon_star / 2, plan.trials,
                           mix_seed(mix_seed(cell_seed, kSaltCalls), tp.n), &c);
      if (c.empty()) continue;
      double mean = 0;
      for (double v : c) mean += v / static_cast<double>(c.size());
      calls.emplace_back(static_cast<double>(tp.n), mean);
    }
    std::string calls_note;
    if (!calls.empty()) base.calls = fit_calls(calls);
    else calls_note = "no successful trials at eps*/2; calls law set to the budget";

    for (Hypothesis h : kHypotheses) {
      ScalingRecord r = base;
      r.note = calls_note;
      try {
        r.fit = fit_scaling(ok, h);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateFit) throw;
        r.fit = ScalingFit{};
        r.fit.hypothesis = h;
        r.fit.n_min = plan.n_min;
        r.fit.n_max = plan.n_max;
        r.note = std::to_string(ok.size()) + " sizes with a threshold; " + e.what();
      }
      out.push_back(std::move(r));
    }
  } catch (const Error& e) {
    emit_all_invalid(std::string(to_string(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    emit_all_invalid(e.what());
  }
  return out;
}

ScalingDatabase build_database(const BuildPlan& plan, const BuildOptions& options) {
  const Provenance prov{plan.hash(), plan.seed, options.date.empty() ? today_utc() : options.date};
  const std::size_t cells = plan.cell_count();
  std::vector<std::vector<ScalingRecord>> results(cells);
  std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(cells, 1));
  std::atomic<std::size_t> next{0};
  std::mutex progress_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      results[i] = build_cell(plan, i, prov);
      if (options.progress) {
        std::lock_guard lock(progress_mu);
        const auto& r = results[i].front();
        options.progress("cell " + std::to_string(i + 1) + "/" + std::to_string(cells) + " " + r.problem_type +
                         " rho=" + json(r.density).dump() + " " + r.vqa + "+" + r.optimizer);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ScalingDatabase db;
  for (auto& cell : results)
    for (auto& r : cell) db.records.push_back(std::move(r));
  return db;
}

}  // namespace qdt::scalability
