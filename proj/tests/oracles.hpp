#pragma once

// Test-only reference implementations. They deliberately avoid the library's
// own evaluation paths so they can serve as independent oracles.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "qdt/common/error.hpp"
#include "qdt/problem/qubo.hpp"

namespace test {

using Dense = std::vector<std::vector<double>>;

inline qdt::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const qdt::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected a qdt::Error");
}

inline Dense to_dense(const qdt::problem::QuboMatrix& q) {
  Dense d(q.size(), std::vector<double>(q.size(), 0.0));
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i; j < q.size(); ++j) d[i][j] = q.at(i, j);
  return d;
}

/// Full double sum x^T M x over the raw matrix, no folding.
inline double dense_objective(const Dense& m, const std::vector<std::uint8_t>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) s += x[i] * m[i][j] * x[j];
  return s;
}

/// Reference minimum: scans indices in increasing order, strict improvement.
inline std::pair<std::uint64_t, double> enumerate_min(const Dense& m) {
  const std::size_t n = m.size();
  std::uint64_t best_idx = 0;
  double best = 0.0;
  for (std::uint64_t idx = 0; idx < (1ULL << n); ++idx) {
    std::vector<std::uint8_t> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (idx >> i) & 1U;
    double v = dense_objective(m, x);
    if (idx == 0 || v < best - 1e-12) {
      best = v;
      best_idx = idx;
    }
  }
  return {best_idx, best};
}

/// Mean and population std of the objective over all 2^n assignments.
inline std::pair<double, double> enumerate_moments(const Dense& m) {
  const std::size_t n = m.size();
  const double count = static_cast<double>(1ULL << n);
  double sum = 0.0, sq = 0.0;
  for (std::uint64_t idx = 0; idx < (1ULL << n); ++idx) {
    std::vector<std::uint8_t> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (idx >> i) & 1U;
    double v = dense_objective(m, x);
    sum += v;
    sq += v * v;
  }
  double mean = sum / count;
  return {mean, std::sqrt(std::max(0.0, sq / count - mean * mean))};
}

using Cplx = std::complex<double>;
using CMat = std::vector<std::vector<Cplx>>;

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.size() * b.size(), std::vector<Cplx>(a.size() * b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k)
        for (std::size_t l = 0; l < b.size(); ++l) out[i * b.size() + k][j * b.size() + l] = a[i][j] * b[k][l];
  return out;
}

inline CMat identity(std::size_t d) {
  CMat m(d, std::vector<Cplx>(d));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1.0;
  return m;
}

inline CMat add(const CMat& a, const CMat& b, Cplx wb = 1.0) {
  CMat out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out[i][j] += wb * b[i][j];
  return out;
}

/// Embeds 2x2 factors into the full space: factors[q] acts on qubit q, and
/// qubit q is bit q of the basis index, so the kron order is q = n-1 ... 0.
inline CMat embed(std::vector<CMat> factors) {
  CMat out = factors.back();
  for (std::size_t q = factors.size() - 1; q-- > 0;) out = kron(out, factors[q]);
  return out;
}

inline std::vector<Cplx> apply(const CMat& m, const std::vector<Cplx>& v) {
  std::vector<Cplx> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

}  // namespace test
