#include "qdt/scalability/fits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "qdt/common/error.hpp"

namespace qdt::scalability {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// JSON has no infinity; null stands for it on disk.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_or_inf(const json& v) { return v.is_null() ? kInf : v.get<double>(); }

json cov_json(const Cov2& c) { return json::array({json::array({c[0], c[1]}), json::array({c[2], c[3]})}); }
Cov2 cov_from(const json& doc) {
  return {doc.at(0).at(0).get<double>(), doc.at(0).at(1).get<double>(), doc.at(1).at(0).get<double>(),
          doc.at(1).at(1).get<double>()};
}

struct Line {
  double c0 = 0.0, c1 = 0.0;
  double v00 = 0.0, v01 = 0.0, v11 = 0.0;
  double r_squared = 0.0;
};

// y = c0 + c1 x by weighted least squares. With `absolute` the weights are
// inverse variances; otherwise the covariance is scaled by the residual
// variance (zero with two points).
Line fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w,
              bool absolute) {
  double s = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += w[i];
    sx += w[i] * x[i];
    sxx += w[i] * x[i] * x[i];
    sy += w[i] * y[i];
    sxy += w[i] * x[i] * y[i];
  }
  const double det = s * sxx - sx * sx;
  if (!(det > 1e-12 * s * sxx) || !std::isfinite(det)) fail(ErrorCode::DegenerateFit, "singular design matrix");
  Line l;
  l.c1 = (s * sxy - sx * sy) / det;
  l.c0 = (sxx * sy - sx * sxy) / det;
  const double ybar = sy / s;
  double ssr = 0, sst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - l.c0 - l.c1 * x[i];
    ssr += w[i] * r * r;
    sst += w[i] * (y[i] - ybar) * (y[i] - ybar);
  }
  if (sst > 0) l.r_squared = std::clamp(1.0 - ssr / sst, 0.0, 1.0);
  else l.r_squared = ssr <= 1e-24 ? 1.0 : 0.0;
  double scale = 1.0;
  if (!absolute) scale = x.size() > 2 ? ssr / static_cast<double>(x.size() - 2) : 0.0;
  l.v00 = scale * sxx / det;
  l.v01 = -scale * sx / det;
  l.v11 = scale * s / det;
  return l;
}

double logistic(double x, double mu, double w) { return 1.0 / (1.0 + std::exp((x - mu) / w)); }

}  // namespace

std::string to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::Exponential: return "exponential";
    case Hypothesis::PowerLaw: return "power_law";
    case Hypothesis::Logarithmic: return "logarithmic";
  }
  return "?";
}

Hypothesis hypothesis_from_string(const std::string& text) {
  for (Hypothesis h : kHypotheses)
    if (to_string(h) == text) return h;
  fail(ErrorCode::InvalidRecord, "unknown scaling hypothesis '" + text + "'");
}

LogisticFit fit_logistic(const std::vector<SuccessSample>& curve) {
  std::vector<SuccessSample> pts = curve;
  for (const auto& p : pts) {
    if (!(p.epsilon > 0) || !std::isfinite(p.epsilon))
      fail(ErrorCode::InsufficientNoiseGrid, "noise levels must be positive and finite");
    if (!(p.rate >= 0.0 && p.rate <= 1.0)) fail(ErrorCode::InvalidRecord, "success rate outside [0, 1]");
  }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.epsilon < b.epsilon; });
  std::set<double> distinct;
  for (const auto& p : pts) distinct.insert(p.epsilon);
  if (distinct.size() < 4) fail(ErrorCode::InsufficientNoiseGrid, "need at least 4 distinct noise levels");
  if (std::log10(*distinct.rbegin() / *distinct.begin()) < 1.0 - 1e-12)
    fail(ErrorCode::InsufficientNoiseGrid, "noise levels must span at least one decade");

  double max_rate = 0, min_rate = 1;
  for (const auto& p : pts) {
    max_rate = std::max(max_rate, p.rate);
    min_rate = std::min(min_rate, p.rate);
  }
  if (max_rate < kSuccessLevel) fail(ErrorCode::NeverSucceeds, "success rate never reaches 0.5");
  if (min_rate >= kSuccessLevel) fail(ErrorCode::NoCrossing, "success rate never drops below 0.5 on the grid");

  const std::size_t m = pts.size();
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = std::log(pts[i].epsilon);
    y[i] = pts[i].rate;
  }
  // start at the first downward crossing
  double mu = x.front();
  double spacing = x.back() - x.front();
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (y[i] >= kSuccessLevel && y[i + 1] < kSuccessLevel) {
      const double t = (y[i] - kSuccessLevel) / (y[i] - y[i + 1]);
      mu = x[i] + t * (x[i + 1] - x[i]);
      spacing = x[i + 1] - x[i];
      break;
    }
  }
  double lw = std::log(std::max(0.1, (x.back() - x.front()) / 10.0));
  const double lw_min = std::log(1e-4);

  // Levenberg-Marquardt on (mu, ln w)
  auto ssr_at = [&](double mu_, double lw_) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = y[i] - logistic(x[i], mu_, std::exp(lw_));
      s += r * r;
    }
    return s;
  };
  auto normal = [&](double mu_, double lw_, double& a00, double& a01, double& a11, double& g0, double& g1) {
    a00 = a01 = a11 = g0 = g1 = 0;
    const double w = std::exp(lw_);
    for (std::size_t i = 0; i < m; ++i) {
      const double s = logistic(x[i], mu_, w);
      const double d = s * (1 - s);
      const double j0 = d / w;                    // ds/dmu
      const double j1 = d * (x[i] - mu_) / w;     // ds/dln w
      const double r = y[i] - s;
      a00 += j0 * j0;
      a01 += j0 * j1;
      a11 += j1 * j1;
      g0 += j0 * r;
      g1 += j1 * r;
    }
  };
  double ssr = ssr_at(mu, lw);
  double lambda = 1e-3;
  for (int it = 0; it < 500 && ssr > 0; ++it) {
    double a00, a01, a11, g0, g1;
    normal(mu, lw, a00, a01, a11, g0, g1);
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      const double b00 = a00 * (1 + lambda) + 1e-300, b11 = a11 * (1 + lambda) + 1e-300;
      const double det = b00 * b11 - a01 * a01;
      if (!(det > 0)) {
        lambda *= 10;
        continue;
      }
      const double d0 = (b11 * g0 - a01 * g1) / det;
      const double d1 = (b00 * g1 - a01 * g0) / det;
      const double mu_n = mu + d0;
      const double lw_n = std::max(lw_min, lw + d1);
      const double ssr_n = ssr_at(mu_n, lw_n);
      if (std::isfinite(ssr_n) && ssr_n < ssr) {
        const double gain = ssr - ssr_n;
        mu = mu_n;
        lw = lw_n;
        ssr = ssr_n;
        lambda = std::max(1e-12, lambda / 10);
        improved = gain > 1e-15 * (1 + ssr);
        break;
      }
      lambda *= 10;
    }
    if (!improved) break;
  }

  LogisticFit out;
  out.epsilon_star = std::exp(mu);
  out.width = std::exp(lw);
  double a00, a01, a11, g0, g1;
  normal(mu, lw, a00, a01, a11, g0, g1);
  const double det = a00 * a11 - a01 * a01;
  const double s2 = m > 2 ? ssr / static_cast<double>(m - 2) : 0.0;
  double var_mu = det > 1e-300 ? s2 * a11 / det : std::numeric_limits<double>::quiet_NaN();
  // A step-like curve leaves no curvature information; the crossing is then
  // only known to lie within one grid interval.
  if (!std::isfinite(var_mu) || (var_mu <= 0 && s2 > 0)) var_mu = spacing * spacing / 12.0;
  out.log_std_error = std::sqrt(std::max(0.0, var_mu));
  return out;
}

json ThresholdPoint::to_json() const {
  json curve = json::array();
  for (const auto& s : success_curve) curve.push_back(json::array({s.epsilon, s.rate}));
  return json{{"n", n},
              {"epsilon_star", number_or_null(epsilon_star)},
              {"std_error", number_or_null(std_error)},
              {"trials", trials},
              {"success_curve", curve},
              {"status", status}};
}

ThresholdPoint ThresholdPoint::from_json(const json& doc) {
  ThresholdPoint p;
  p.n = doc.at("n").get<std::size_t>();
  p.epsilon_star = doc.at("epsilon_star").is_null() ? 0.0 : doc.at("epsilon_star").get<double>();
  p.std_error = doc.at("std_error").is_null() ? 0.0 : doc.at("std_error").get<double>();
  p.trials = doc.at("trials").get<std::size_t>();
  for (const auto& s : doc.at("success_curve")) p.success_curve.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
  p.status = doc.value("status", std::string("ok"));
  return p;
}

ThresholdPoint fit_threshold(std::size_t n, std::size_t trials, const std::vector<SuccessSample>& curve) {
  const LogisticFit f = fit_logistic(curve);
  ThresholdPoint p;
  p.n = n;
  p.epsilon_star = f.epsilon_star;
  p.std_error = f.epsilon_star * f.log_std_error;
  p.trials = trials;
  p.success_curve = curve;
  return p;
}

double ScalingFit::domain_bound() const {
  if (hypothesis != Hypothesis::Logarithmic) return kInf;
  if (b <= 0) return a > 0 ? kInf : 0.0;
  return std::exp(a / b);
}

double ScalingFit::epsilon_star(double n) const {
  switch (hypothesis) {
    case Hypothesis::Exponential: return a * std::exp(-b * n);
    case Hypothesis::PowerLaw: return a * std::pow(n, -b);
    case Hypothesis::Logarithmic: {
      const double e = a - b * std::log(n);
      if (!(e > 0))
        fail(ErrorCode::DomainExceeded, "logarithmic threshold is nonpositive at n=" + std::to_string(n));
      return e;
    }
  }
  return 0.0;
}

double ScalingFit::var_log_epsilon_star(double n) const {
  const double vaa = covariance[0], vab = covariance[1], vbb = covariance[3];
  double v = 0;
  if (hypothesis == Hypothesis::Logarithmic) {
    const double x = std::log(n);
    const double e = epsilon_star(n);
    v = (vaa + x * x * vbb - 2 * x * vab) / (e * e);
  } else {
    const double x = hypothesis == Hypothesis::Exponential ? n : std::log(n);
    v = vaa / (a * a) + x * x * vbb - 2 * x * vab / a;
  }
  return std::max(0.0, v);
}

json ScalingFit::to_json() const {
  return json{{"hypothesis", to_string(hypothesis)},
              {"params", {{"A", a}, {"B", b}}},
              {"covariance", cov_json(covariance)},
              {"r_squared", r_squared},
              {"valid", valid},
              {"fitted_n_range", json::array({n_min, n_max})}};
}

ScalingFit ScalingFit::from_json(const json& doc) {
  ScalingFit f;
  f.hypothesis = hypothesis_from_string(doc.at("hypothesis").get<std::string>());
  f.a = doc.at("params").at("A").get<double>();
  f.b = doc.at("params").at("B").get<double>();
  f.covariance = cov_from(doc.at("covariance"));
  f.r_squared = doc.at("r_squared").get<double>();
  f.valid = doc.at("valid").get<bool>();
  f.n_min = doc.at("fitted_n_range").at(0).get<std::size_t>();
  f.n_max = doc.at("fitted_n_range").at(1).get<std::size_t>();
  return f;
}

ScalingFit fit_scaling(const std::vector<ThresholdPoint>& points, Hypothesis h) {
  if (points.size() < 3) fail(ErrorCode::DegenerateFit, "scaling fit needs at least 3 sizes");
  const std::size_t m = points.size();
  std::vector<double> x(m), y(m), sd(m);
  bool absolute = true;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& p = points[i];
    if (!(p.epsilon_star > 0) || !std::isfinite(p.epsilon_star) || p.n == 0)
      fail(ErrorCode::DegenerateFit, "threshold points must have positive eps* and n");
    const double n = static_cast<double>(p.n);
    x[i] = h == Hypothesis::Exponential ? n : std::log(n);
    y[i] = h == Hypothesis::Logarithmic ? p.epsilon_star : std::log(p.epsilon_star);
    sd[i] = h == Hypothesis::Logarithmic ? p.std_error : p.std_error / p.epsilon_star;
    if (!(sd[i] > 0) || !std::isfinite(sd[i])) absolute = false;
  }
  std::vector<double> w(m, 1.0);
  if (absolute)
    for (std::size_t i = 0; i < m; ++i) w[i] = 1.0 / (sd[i] * sd[i]);
  const Line l = fit_line(x, y, w, absolute);

  ScalingFit f;
  f.hypothesis = h;
  f.b = -l.c1;
  if (h == Hypothesis::Logarithmic) {
    f.a = l.c0;
    f.covariance = {l.v00, -l.v01, -l.v01, l.v11};
  } else {
    f.a = std::exp(l.c0);
    f.covariance = {f.a * f.a * l.v00, -f.a * l.v01, -f.a * l.v01, l.v11};
  }
  f.r_squared = l.r_squared;
  f.valid = f.r_squared >= kMinRSquared && f.b > 0;
  f.n_min = points.front().n;
  f.n_max = points.front().n;
  for (const auto& p : points) {
    f.n_min = std::min(f.n_min, p.n);
    f.n_max = std::max(f.n_max, p.n);
  }
  return f;
}

double KappaFit::kappa(double n) const { return a * std::exp(b * n); }

double KappaFit::var_log_kappa(double n) const {
  if (!(a > 0)) return 0.0;
  return std::max(0.0, covariance[0] / (a * a) + n * n * covariance[3] + 2 * n * covariance[1] / a);
}

json KappaFit::to_json() const { return json{{"a", a}, {"b", b}, {"covariance", cov_json(covariance)}}; }

KappaFit KappaFit::from_json(const json& doc) {
  KappaFit k;
  k.a = doc.at("a").get<double>();
  k.b = doc.at("b").get<double>();
  k.covariance = cov_from(doc.at("covariance"));
  return k;
}

namespace {

// Unweighted log-linear fit shared by kappa and calls; returns (c0, c1) on
// ln y with covariance, or a constant when only one x is present.
Line log_linear(const std::vector<std::pair<double, double>>& samples, bool log_x, const char* what) {
  std::vector<double> x, y;
  for (const auto& [n, v] : samples) {
    if (!(v > 0) || !std::isfinite(v)) continue;
    x.push_back(log_x ? std::log(n) : n);
    y.push_back(std::log(v));
  }
  if (x.empty()) fail(ErrorCode::DegenerateFit, std::string(what) + ": no positive samples");
  if (std::set<double>(x.begin(), x.end()).size() == 1) {
    Line l;
    const double m = static_cast<double>(y.size());
    double mean = 0;
    for (double v : y) mean += v / m;
    double var = 0;
    for (double v : y) var += (v - mean) * (v - mean);
    l.c0 = mean;
    l.v00 = y.size() > 1 ? var / (m - 1) / m : 0.0;
    l.r_squared = 1.0;
    return l;
  }
  return fit_line(x, y, std::vector<double>(x.size(), 1.0), false);
}

}  // namespace

KappaFit fit_kappa(const std::vector<std::pair<double, double>>& samples) {
  if (samples.empty()) fail(ErrorCode::DegenerateFit, "kappa fit: no samples");
  bool any_positive = false;
  for (const auto& s : samples) any_positive |= s.second > 0;
  KappaFit k;
  if (!any_positive) {
    // zero-variance states throughout
    k.a = 0.0;
    k.b = 0.0;
    return k;
  }
  const Line l = log_linear(samples, false, "kappa fit");
  k.a = std::exp(l.c0);
  k.b = l.c1;
  k.covariance = {k.a * k.a * l.v00, k.a * l.v01, k.a * l.v01, l.v11};
  return k;
}

double CallsFit::calls(double n) const { return c * std::pow(n, gamma); }

json CallsFit::to_json() const { return json{{"C", c}, {"gamma", gamma}, {"covariance", cov_json(covariance)}}; }

CallsFit CallsFit::from_json(const json& doc) {
  CallsFit f;
  f.c = doc.at("C").get<double>();
  f.gamma = doc.at("gamma").get<double>();
  f.covariance = cov_from(doc.at("covariance"));
  return f;
}

CallsFit fit_calls(const std::vector<std::pair<double, double>>& samples) {
  const Line l = log_linear(samples, true, "calls fit");
  CallsFit f;
  f.c = std::exp(l.c0);
  f.gamma = l.c1;
  f.covariance = {f.c * f.c * l.v00, f.c * l.v01, f.c * l.v01, l.v11};
  return f;
}

json ShotEstimate::to_json() const {
  return json{{"point", number_or_null(point)},
              {"low", number_or_null(low)},
              {"high", number_or_null(high)},
              {"domain_exceeded", domain_exceeded}};
}

ShotEstimate ShotEstimate::from_json(const json& doc) {
  ShotEstimate s;
  s.point = number_or_inf(doc.at("point"));
  s.low = number_or_inf(doc.at("low"));
  s.high = number_or_inf(doc.at("high"));
  s.domain_exceeded = doc.value("domain_exceeded", false);
  return s;
}

ShotEstimate estimate_shots(const ScalingFit& fit, const KappaFit& kappa, double n) {
  ShotEstimate out;
  double eps = 0;
  try {
    eps = fit.epsilon_star(n);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DomainExceeded) throw;
    out.point = out.low = out.high = kInf;
    out.domain_exceeded = true;
    return out;
  }
  const double k = kappa.kappa(n);
  if (!(k > 0)) {
    out.point = out.low = out.high = 1.0;
    return out;
  }
  const double raw = std::exp(2.0 * (std::log(k) - std::log(eps)));
  out.point = std::max(1.0, std::ceil(raw));
  const double sigma = std::sqrt(4.0 * (kappa.var_log_kappa(n) + fit.var_log_epsilon_star(n)));
  if (!std::isfinite(out.point)) {
    out.low = out.high = out.point;
    return out;
  }
  out.low = std::min(out.point, std::exp(std::log(out.point) - kZ95 * sigma));
  out.high = std::max(out.point, std::exp(std::log(out.point) + kZ95 * sigma));
  return out;
}

bool disadvantage_check(double n, double n_shots, double n_calls) {
  if (std::isnan(n) || std::isnan(n_shots) || std::isnan(n_calls))
    fail(ErrorCode::OutOfRange, "disadvantage check needs numeric inputs");
  if (!(n_shots > 0) || !(n_calls > 0)) fail(ErrorCode::OutOfRange, "shots and calls must be positive");
  if (!std::isfinite(n_shots) || !std::isfinite(n_calls)) return false;
  if (!std::isfinite(n)) return n > 0;

  const double margin = std::log2(n_shots) + std::log2(n_calls) - n;
  if (std::abs(margin) > 1e-9 * std::max(1.0, std::abs(n))) return margin < 0;

  // near the boundary: redo the comparison exactly where possible
  constexpr double k2to64 = 18446744073709551616.0;
  const bool integral = n_shots == std::floor(n_shots) && n_calls == std::floor(n_calls) && n_shots < k2to64 &&
                        n_calls < k2to64 && n == std::floor(n) && n >= 0 && n < 128;
  if (integral) {
    using u128 = unsigned __int128;
    const u128 a = static_cast<std::uint64_t>(n_shots);
    const u128 b = static_cast<std::uint64_t>(n_calls);
    const u128 bound = static_cast<u128>(1) << static_cast<unsigned>(n);
    if (b != 0 && a > (~static_cast<u128>(0)) / b) return false;
    return a * b < bound;
  }
  const long double lm = std::log2(static_cast<long double>(n_shots)) +
                         std::log2(static_cast<long double>(n_calls)) - static_cast<long double>(n);
  return lm < 0;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Feasible: return "feasible";
    case Status::Infeasible: return "infeasible";
    case Status::NotCharacterizable: return "not_characterizable";
  }
  return "?";
}

Status status_from_string(const std::string& text) {
  for (Status s : {Status::Feasible, Status::Infeasible, Status::NotCharacterizable})
    if (to_string(s) == text) return s;
  fail(ErrorCode::InvalidRecord, "unknown status '" + text + "'");
}

json HypothesisEstimate::to_json() const {
  return json{{"hypothesis", to_string(hypothesis)},
              {"valid", valid},
              {"estimate", shots ? shots->to_json() : json(nullptr)}};
}

HypothesisEstimate HypothesisEstimate::from_json(const json& doc) {
  HypothesisEstimate h;
  h.hypothesis = hypothesis_from_string(doc.at("hypothesis").get<std::string>());
  h.valid = doc.at("valid").get<bool>();
  if (!doc.at("estimate").is_null()) h.shots = ShotEstimate::from_json(doc.at("estimate"));
  return h;
}

std::optional<double> worst_case(const std::vector<HypothesisEstimate>& estimates) {
  std::optional<double> out;
  for (const auto& e : estimates) {
    if (!e.valid || !e.shots) continue;
    if (!out || e.shots->point > *out) out = e.shots->point;
  }
  return out;
}

Status classify(const std::vector<HypothesisEstimate>& estimates, std::size_t never_succeeds_sizes, double n,
                double n_calls) {
  if (never_succeeds_sizes >= kNeverSucceedsLimit) return Status::NotCharacterizable;
  const std::optional<double> wc = worst_case(estimates);
  if (!wc) return Status::NotCharacterizable;
  return disadvantage_check(n, *wc, n_calls) ? Status::Feasible : Status::Infeasible;
}

}  // namespace qdt::scalability
