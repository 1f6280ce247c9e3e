#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdt/common/json.hpp"

namespace qdt::scalability {

enum class Hypothesis { Exponential, PowerLaw, Logarithmic };

inline constexpr std::array<Hypothesis, 3> kHypotheses{Hypothesis::Exponential, Hypothesis::PowerLaw,
                                                       Hypothesis::Logarithmic};

std::string to_string(Hypothesis h);
Hypothesis hypothesis_from_string(const std::string& text);

/// Success level defining the tolerance threshold.
inline constexpr double kSuccessLevel = 0.5;
/// Validity gate of a scaling fit.
inline constexpr double kMinRSquared = 0.8;
/// Two-sided 95% normal quantile used for every interval.
inline constexpr double kZ95 = 1.96;

/// Symmetric 2x2 covariance stored row-major.
using Cov2 = std::array<double, 4>;

struct SuccessSample {
  double epsilon = 0.0;
  double rate = 0.0;
};

/// Logistic s(eps) = 1 / (1 + exp((ln eps - ln eps*) / w)) fitted in log-noise.
struct LogisticFit {
  double epsilon_star = 0.0;
  double width = 0.0;
  /// Standard error of ln eps*.
  double log_std_error = 0.0;
};

/// Throws InsufficientNoiseGrid (fewer than 4 distinct noise levels or less
/// than one decade), NeverSucceeds (max rate below the success level) or
/// NoCrossing (curve never drops below it).
LogisticFit fit_logistic(const std::vector<SuccessSample>& curve);

struct ThresholdPoint {
  std::size_t n = 0;
  double epsilon_star = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::vector<SuccessSample> success_curve;
  /// "ok" | "no_crossing" | "never_succeeds"
  std::string status = "ok";

  json to_json() const;
  static ThresholdPoint from_json(const json& doc);
};

/// Fits the curve; std_error is that of eps* itself. Throws like fit_logistic.
ThresholdPoint fit_threshold(std::size_t n, std::size_t trials, const std::vector<SuccessSample>& curve);

/// eps*(n) under one hypothesis:
///   exponential  A * exp(-B n)
///   power_law    A * n^-B
///   logarithmic  A - B ln n
/// `covariance` is that of (A, B).
struct ScalingFit {
  Hypothesis hypothesis = Hypothesis::Exponential;
  double a = 0.0;
  double b = 0.0;
  Cov2 covariance{};
  double r_squared = 0.0;
  bool valid = false;
  std::size_t n_min = 0;
  std::size_t n_max = 0;

  /// Largest real n with eps* > 0; infinite except for the logarithmic form.
  double domain_bound() const;
  /// Throws DomainExceeded past the domain bound.
  double epsilon_star(double n) const;
  double var_log_epsilon_star(double n) const;

  json to_json() const;
  static ScalingFit from_json(const json& doc);
};

/// Weighted least squares in the linearized form. Points with zero standard
/// error fall back to unit weights with the residual variance as scale.
/// Throws DegenerateFit for fewer than 3 points or a singular design.
ScalingFit fit_scaling(const std::vector<ThresholdPoint>& points, Hypothesis h);

/// kappa(n) = a * exp(b n); covariance of (a, b).
struct KappaFit {
  double a = 1.0;
  double b = 0.0;
  Cov2 covariance{};

  double kappa(double n) const;
  double var_log_kappa(double n) const;

  json to_json() const;
  static KappaFit from_json(const json& doc);
};

/// Least squares on ln kappa; zero-valued samples are skipped. A single
/// usable size gives b = 0. Throws DegenerateFit without usable samples.
KappaFit fit_kappa(const std::vector<std::pair<double, double>>& samples);

/// n_calls(n) = c * n^gamma; covariance of (c, gamma).
struct CallsFit {
  double c = 0.0;
  double gamma = 0.0;
  Cov2 covariance{};

  double calls(double n) const;

  json to_json() const;
  static CallsFit from_json(const json& doc);
};

/// Least squares on ln calls vs ln n. One size gives gamma = 0.
CallsFit fit_calls(const std::vector<std::pair<double, double>>& samples);

struct ShotEstimate {
  double point = 0.0;
  double low = 0.0;
  double high = 0.0;
  /// True past the logarithmic domain bound; all three values are infinite.
  bool domain_exceeded = false;

  json to_json() const;
  static ShotEstimate from_json(const json& doc);
};

/// point = ceil((kappa / eps*)^2), at least 1; bounds from the delta method
/// on ln n_shots with var = 4 (var ln kappa + var ln eps*).
ShotEstimate estimate_shots(const ScalingFit& fit, const KappaFit& kappa, double n);

/// True iff n_shots * n_calls < 2^n, decided in log2 space. Within a few
/// ulps of the boundary the comparison is redone exactly (128-bit integers
/// for integral factors, extended precision otherwise). Infinite inputs are
/// infeasible; nonpositive ones throw OutOfRange.
bool disadvantage_check(double n, double n_shots, double n_calls);

enum class Status { Feasible, Infeasible, NotCharacterizable };
std::string to_string(Status s);
Status status_from_string(const std::string& text);

struct HypothesisEstimate {
  Hypothesis hypothesis = Hypothesis::Exponential;
  bool valid = false;
  /// Absent when the fit itself failed.
  std::optional<ShotEstimate> shots;

  json to_json() const;
  static HypothesisEstimate from_json(const json& doc);
};

/// Largest point estimate over valid hypotheses; none when none is valid.
std::optional<double> worst_case(const std::vector<HypothesisEstimate>& estimates);

/// Failures at two or more sizes make a combination not characterizable.
inline constexpr std::size_t kNeverSucceedsLimit = 2;

Status classify(const std::vector<HypothesisEstimate>& estimates, std::size_t never_succeeds_sizes, double n,
                double n_calls);

}  // namespace qdt::scalability
