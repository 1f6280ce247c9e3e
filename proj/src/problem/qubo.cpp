#include "qdt/problem/qubo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "qdt/common/error.hpp"

namespace qdt::problem {

Bitstring bits_from_index(std::uint64_t index, std::size_t n) {
  Bitstring x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((index >> i) & 1U);
  return x;
}

std::uint64_t index_from_bits(const Bitstring& x) {
  if (x.size() > 64) fail(ErrorCode::TooLarge, "bitstring longer than 64 bits has no index");
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) index |= (std::uint64_t{1} << i);
  return index;
}

std::string to_string(const Bitstring& x) {
  std::string s(x.size(), '0');
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] ? '1' : '0';
  return s;
}

Bitstring bits_from_string(const std::string& text) {
  Bitstring x(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1')
      fail(ErrorCode::SchemaViolation, "bitstring may only contain 0 and 1: " + text);
    x[i] = text[i] == '1';
  }
  return x;
}

QuboMatrix::QuboMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}

QuboMatrix::QuboMatrix(const std::vector<std::vector<double>>& rows) : QuboMatrix(rows.size()) {
  for (std::size_t i = 0; i < n_; ++i) {
    if (rows[i].size() != n_)
      fail(ErrorCode::InvalidMatrix, "qubo matrix must be square: row " + std::to_string(i) +
                                         " has " + std::to_string(rows[i].size()) +
                                         " entries, expected " + std::to_string(n_));
    for (std::size_t j = 0; j < n_; ++j) {
      if (!std::isfinite(rows[i][j]))
        fail(ErrorCode::InvalidMatrix, "qubo matrix entries must be finite");
      if (rows[i][j] != 0.0) add(i, j, rows[i][j]);
    }
  }
}

QuboMatrix QuboMatrix::from_json(const json& rows) {
  if (!rows.is_array())
    fail(ErrorCode::InvalidMatrix, "qubo matrix must be a square two-dimensional array");
  std::vector<std::vector<double>> dense;
  dense.reserve(rows.size());
  for (const auto& row : rows) {
    if (!row.is_array())
      fail(ErrorCode::InvalidMatrix, "qubo matrix must be a square two-dimensional array");
    std::vector<double> values;
    values.reserve(row.size());
    for (const auto& v : row) {
      if (!v.is_number()) fail(ErrorCode::InvalidMatrix, "qubo matrix entries must be numbers");
      values.push_back(v.get<double>());
    }
    dense.push_back(std::move(values));
  }
  return QuboMatrix(dense);
}

json QuboMatrix::to_json() const {
  json rows = json::array();
  for (std::size_t i = 0; i < n_; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < n_; ++j) row.push_back(entries_[i * n_ + j]);
    rows.push_back(std::move(row));
  }
  return rows;
}

double QuboMatrix::at(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return entries_[i * n_ + j];
}

void QuboMatrix::add(std::size_t i, std::size_t j, double value) {
  if (i >= n_ || j >= n_) fail(ErrorCode::InvalidMatrix, "qubo index out of range");
  if (i > j) std::swap(i, j);
  entries_[i * n_ + j] += value;
}

void QuboMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= n_ || j >= n_) fail(ErrorCode::InvalidMatrix, "qubo index out of range");
  if (!std::isfinite(value)) fail(ErrorCode::InvalidMatrix, "qubo matrix entries must be finite");
  if (i > j) std::swap(i, j);
  entries_[i * n_ + j] = value;
}

std::size_t QuboMatrix::nonzero_slots() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j)
      if (entries_[i * n_ + j] != 0.0) ++count;
  return count;
}

std::size_t QuboMatrix::nonzero_off_diagonal() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (entries_[i * n_ + j] != 0.0) ++count;
  return count;
}

bool QuboMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](double v) { return v == 0.0; });
}

double qubo_objective(const QuboMatrix& q, std::span<const std::uint8_t> x) {
  const std::size_t n = q.size();
  if (x.size() != n)
    fail(ErrorCode::LengthMismatch, "bitstring has length " + std::to_string(x.size()) +
                                        ", qubo has " + std::to_string(n) + " variables");
  const auto& e = q.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!x[i]) continue;
    sum += e[i * n + i];
    for (std::size_t j = i + 1; j < n; ++j)
      if (x[j]) sum += e[i * n + j];
  }
  return sum;
}

std::vector<double> qubo_energies(const QuboMatrix& q) {
  const std::size_t n = q.size();
  if (n > 30) fail(ErrorCode::TooLarge, "energy table limited to 30 variables");
  const auto& e = q.data();
  std::vector<double> energies(std::size_t{1} << n, 0.0);
  for (std::uint64_t b = 1; b < energies.size(); ++b) {
    const unsigned high = 63U - static_cast<unsigned>(std::countl_zero(b));
    const std::uint64_t rest = b & ~(std::uint64_t{1} << high);
    double delta = e[high * n + high];
    for (std::uint64_t r = rest; r != 0; r &= r - 1) {
      const unsigned j = static_cast<unsigned>(std::countr_zero(r));
      delta += e[j * n + high];
    }
    energies[b] = energies[rest] + delta;
  }
  return energies;
}

Optimum brute_force_optimum(const QuboMatrix& q, std::size_t cap) {
  const std::size_t n = q.size();
  if (n > cap || n > 62)
    fail(ErrorCode::TooLarge, "brute force limited to " + std::to_string(cap) +
                                  " variables, got " + std::to_string(n));
  const auto& e = q.data();
  std::uint64_t best_index = 0;
  double best = 0.0;  // all-zero assignment
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t b = 1; b < total; ++b) {
    double sum = 0.0;
    for (std::uint64_t r = b; r != 0; r &= r - 1) {
      const unsigned i = static_cast<unsigned>(std::countr_zero(r));
      sum += e[i * n + i];
      for (std::uint64_t s = r & (r - 1); s != 0; s &= s - 1) {
        const unsigned j = static_cast<unsigned>(std::countr_zero(s));
        sum += e[i * n + j];
      }
    }
    if (sum < best) {
      best = sum;
      best_index = b;
    }
  }
  return {bits_from_index(best_index, n), best};
}

QuboMatrix random_qubo(std::size_t n, double density, std::uint64_t seed) {
  if (n == 0) fail(ErrorCode::InvalidMatrix, "random_qubo needs n >= 1");
  if (!(density > 0.0 && density <= 1.0))
    fail(ErrorCode::InvalidDensity, "density must lie in (0, 1], got " + std::to_string(density));
  const std::size_t slots = n * (n + 1) / 2;
  auto count = static_cast<std::size_t>(std::llround(density * static_cast<double>(slots)));
  count = std::clamp<std::size_t>(count, 1, slots);

  std::vector<std::pair<std::size_t, std::size_t>> cells;
  cells.reserve(slots);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) cells.emplace_back(i, j);

  std::mt19937_64 rng(seed);
  // partial Fisher-Yates picks `count` distinct slots
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, slots - 1);
    std::swap(cells[k], cells[pick(rng)]);
  }
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  QuboMatrix q(n);
  for (std::size_t k = 0; k < count; ++k) {
    double v = 0.0;
    while (v == 0.0) v = value(rng);
    q.set(cells[k].first, cells[k].second, v);
  }
  return q;
}

double uniform_loss_mean(const QuboMatrix& q) {
  const std::size_t n = q.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean += q.at(i, i) / 2.0;
    for (std::size_t j = i + 1; j < n; ++j) mean += q.at(i, j) / 4.0;
  }
  return mean;
}

double uniform_loss_stddev(const QuboMatrix& q) {
  // f = sum_i a_i x_i + sum_{i<j} b_ij x_i x_j with x_i iid Bernoulli(1/2):
  // Var = sum a^2/4 + 3/16 sum b^2 + sum_i a_i s_i/4 + sum_i (s_i^2 - r_i)/16,
  // s_i = sum_j b_ij, r_i = sum_j b_ij^2.
  const std::size_t n = q.size();
  double var = 0.0;
  double pair_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = q.at(i, i);
    double s = 0.0;
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double b = q.at(i, j);
      s += b;
      r += b * b;
      if (j > i) pair_sq += b * b;
    }
    var += a * a / 4.0 + a * s / 4.0 + (s * s - r) / 16.0;
  }
  var += 3.0 * pair_sq / 16.0;
  return std::sqrt(std::max(var, 0.0));
}

double qubo_density(const QuboMatrix& q) {
  const std::size_t n = q.size();
  if (n == 0) return 0.0;
  return static_cast<double>(q.nonzero_slots()) / static_cast<double>(n * (n + 1) / 2);
}

}  // namespace qdt::problem
