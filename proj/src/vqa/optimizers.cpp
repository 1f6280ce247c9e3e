#include <cmath>
#include <numbers>
#include <random>

#include "qdt/common/error.hpp"
#include "qdt/vqa/optimizer.hpp"

namespace qdt::vqa {

namespace {

double checked(double v, const char* who) {
  if (!std::isfinite(v)) fail(ErrorCode::OptimizerFailure, std::string(who) + ": loss is not finite");
  return v;
}

class Spsa final : public Optimizer {
 public:
  static constexpr std::size_t kCalibrationSteps = 5;

  explicit Spsa(SpsaSettings s) : s_(s) {}
  std::string name() const override { return "spsa"; }
  json settings() const override { return json{{"a", s_.a}, {"c", s_.c}, {"max_iters", s_.max_iters}}; }

  void minimize(Objective& f, Params x, std::uint64_t seed) override {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    auto perturbation = [&] {
      Params delta(x.size());
      for (double& d : delta) d = coin(rng) ? 1.0 : -1.0;
      return delta;
    };
    auto estimate = [&](const Params& delta, double ck) {
      Params plus = x, minus = x;
      for (std::size_t i = 0; i < x.size(); ++i) {
        plus[i] += ck * delta[i];
        minus[i] -= ck * delta[i];
      }
      const double fp = checked(f.loss(plus), "spsa");
      const double fm = checked(f.loss(minus), "spsa");
      return (fp - fm) / (2.0 * ck);
    };
    // gain calibration: `a` is the length of the first step
    double magnitude = 0.0;
    for (std::size_t k = 0; k < kCalibrationSteps; ++k) magnitude += std::abs(estimate(perturbation(), s_.c));
    magnitude /= static_cast<double>(kCalibrationSteps);
    const double gain = magnitude > 0.0 ? s_.a / magnitude : s_.a;
    for (std::size_t k = 0; k < s_.max_iters; ++k) {
      const double ak = gain / std::pow(static_cast<double>(k + 1), 0.602);
      const double ck = s_.c / std::pow(static_cast<double>(k + 1), 0.101);
      const Params delta = perturbation();
      const double g = estimate(delta, ck);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= ak * g * delta[i];
      f.iterate(x);
    }
  }

 private:
  SpsaSettings s_;
};

// Each step fixes all but one parameter. The loss restricted to parameter k
// is C + A cos(w theta - B) when every gate it drives has frequency w, so
// three evaluations locate the minimum in closed form.
class Nft final : public Optimizer {
 public:
  explicit Nft(std::size_t max_sweeps) : max_sweeps_(max_sweeps) {}
  std::string name() const override { return "nft"; }
  json settings() const override { return json::object(); }

  void minimize(Objective& f, Params x, std::uint64_t) override {
    for (std::size_t sweep = 0; sweep < max_sweeps_; ++sweep) {
      bool moved = false;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double w = k < f.frequencies.size() ? f.frequencies[k] : 1.0;
        if (w <= 0.0) continue;
        const double s = std::numbers::pi / (2.0 * w);
        Params p = x;
        const double f0 = checked(f.loss(p), "nft");
        p[k] = x[k] + s;
        const double fp = checked(f.loss(p), "nft");
        p[k] = x[k] - s;
        const double fm = checked(f.loss(p), "nft");
        const double c = 0.5 * (fp + fm);
        const double phase = std::atan2(0.5 * (fm - fp), f0 - c);
        x[k] += (std::numbers::pi - phase) / w;
        // keep the angle in (-pi/w, pi/w]
        const double period = 2.0 * std::numbers::pi / w;
        x[k] -= period * std::round(x[k] / period);
        f.iterate(x);
        moved = true;
      }
      if (!moved) return;
    }
  }

 private:
  std::size_t max_sweeps_;
};

class ParameterShiftGd final : public Optimizer {
 public:
  explicit ParameterShiftGd(GradientDescentSettings s) : s_(s) {}
  std::string name() const override { return "ps_gd"; }
  json settings() const override {
    return json{{"step_length", s_.step_length}, {"max_iters", s_.max_iters}};
  }

  void minimize(Objective& f, Params x, std::uint64_t) override {
    for (std::size_t k = 0; k < s_.max_iters; ++k) {
      checked(f.loss(x), "ps_gd");
      Params g = f.gradient(x);
      for (std::size_t i = 0; i < x.size(); ++i) {
        checked(g[i], "ps_gd");
        x[i] -= s_.step_length * g[i];
      }
      f.iterate(x);
    }
  }

 private:
  GradientDescentSettings s_;
};

// Direction-set method with a golden-section line search of fixed length.
class Powell final : public Optimizer {
 public:
  explicit Powell(PowellSettings s) : s_(s) {}
  std::string name() const override { return "powell"; }
  json settings() const override {
    return json{{"initial_step", s_.initial_step}, {"max_iters", s_.max_iters}};
  }

  void minimize(Objective& f, Params x, std::uint64_t) override {
    const std::size_t n = x.size();
    if (n == 0) return;
    std::vector<Params> dirs(n, Params(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) dirs[i][i] = 1.0;
    double fx = checked(f.loss(x), "powell");
    for (std::size_t it = 0; it < s_.max_iters; ++it) {
      const Params start = x;
      const double f_start = fx;
      std::size_t biggest = 0;
      double biggest_drop = 0.0;
      for (std::size_t d = 0; d < n; ++d) {
        const double before = fx;
        fx = line_min(f, x, dirs[d], fx);
        if (before - fx > biggest_drop) {
          biggest_drop = before - fx;
          biggest = d;
        }
      }
      f.iterate(x);
      Params step(n);
      double len = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        step[i] = x[i] - start[i];
        len += step[i] * step[i];
      }
      if (len < 1e-18 || f_start - fx < 1e-12) continue;
      len = std::sqrt(len);
      for (double& v : step) v /= len;
      dirs.erase(dirs.begin() + static_cast<std::ptrdiff_t>(biggest));
      dirs.push_back(step);
      fx = line_min(f, x, dirs.back(), fx);
      f.iterate(x);
    }
  }

 private:
  double line_min(Objective& f, Params& x, const Params& dir, double fx) const {
    auto at = [&](double t) {
      Params p = x;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += t * dir[i];
      return checked(f.loss(p), "powell");
    };
    const double h = s_.initial_step;
    double lo = -h, hi = h;
    const double f_hi = at(hi);
    const double f_lo = at(lo);
    // expand once toward the descending side
    if (f_hi < fx && f_hi <= f_lo) {
      lo = 0.0;
      hi = 2.0 * h;
    } else if (f_lo < fx) {
      hi = 0.0;
      lo = -2.0 * h;
    }
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - r * (hi - lo), b = lo + r * (hi - lo);
    double fa = at(a), fb = at(b);
    for (int i = 0; i < 6; ++i) {
      if (fa < fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - r * (hi - lo);
        fa = at(a);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + r * (hi - lo);
        fb = at(b);
      }
    }
    double best_t = 0.0, best = fx;
    for (auto [t, v] : {std::pair{a, fa}, {b, fb}, {h, f_hi}, {-h, f_lo}})
      if (v < best) {
        best = v;
        best_t = t;
      }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += best_t * dir[i];
    return best;
  }

  PowellSettings s_;
};

}  // namespace

std::shared_ptr<Optimizer> make_spsa(SpsaSettings s) { return std::make_shared<Spsa>(s); }
std::shared_ptr<Optimizer> make_nft(std::size_t max_sweeps) { return std::make_shared<Nft>(max_sweeps); }
std::shared_ptr<Optimizer> make_ps_gd(GradientDescentSettings s) {
  return std::make_shared<ParameterShiftGd>(s);
}
std::shared_ptr<Optimizer> make_powell(PowellSettings s) { return std::make_shared<Powell>(s); }

}  // namespace qdt::vqa
