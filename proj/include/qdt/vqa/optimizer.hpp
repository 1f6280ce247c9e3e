#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qdt/common/json.hpp"

namespace qdt::vqa {

using Params = std::vector<double>;

/// Thrown by the objective once the call budget is spent. Optimizers let it
/// propagate; the runtime turns it into a trace status.
struct BudgetExhausted {};

/// What an optimizer sees of the variational problem.
struct Objective {
  std::size_t dim = 0;
  /// Loss at a parameter point (one circuit call).
  std::function<double(const Params&)> loss;
  /// Parameter-shift gradient (several circuit calls).
  std::function<Params(const Params&)> gradient;
  /// Angular frequency of the loss in each parameter; 0 means the parameter
  /// drives no gate.
  std::vector<double> frequencies;
  /// Reports the optimizer's current iterate.
  std::function<void(const Params&)> iterate;
};

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual std::string name() const = 0;
  virtual json settings() const = 0;
  /// Runs until its own stopping rule fires or the objective throws
  /// BudgetExhausted.
  virtual void minimize(Objective& objective, Params x0, std::uint64_t seed) = 0;
};

struct SpsaSettings {
  double a = 1.0;
  double c = 0.1;
  std::size_t max_iters = 1000;
};

struct GradientDescentSettings {
  double step_length = 0.1;
  std::size_t max_iters = 200;
};

struct PowellSettings {
  double initial_step = 0.5;
  std::size_t max_iters = 50;
};

std::shared_ptr<Optimizer> make_spsa(SpsaSettings s = {});
/// Sequential single-parameter sinusoid minimisation, three calls per step.
std::shared_ptr<Optimizer> make_nft(std::size_t max_sweeps = 1000);
std::shared_ptr<Optimizer> make_ps_gd(GradientDescentSettings s = {});
std::shared_ptr<Optimizer> make_powell(PowellSettings s = {});

}  // namespace qdt::vqa
