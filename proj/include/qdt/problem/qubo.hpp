#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdt/common/json.hpp"

namespace qdt::problem {

/// Binary assignment; element i is x_i. Bit i of the integer encoding is x_i,
/// so "lowest binary value" means lowest sum of x_i * 2^i.
using Bitstring = std::vector<std::uint8_t>;

Bitstring bits_from_index(std::uint64_t index, std::size_t n);
std::uint64_t index_from_bits(const Bitstring& x);
/// "x0x1...x(n-1)", x0 first.
std::string to_string(const Bitstring& x);
Bitstring bits_from_string(const std::string& text);

/// Square QUBO matrix in upper-triangular-plus-diagonal storage. Entries below
/// the diagonal are always zero; ingestion folds Q_ji into Q_ij for i < j.
class QuboMatrix {
 public:
  QuboMatrix() = default;
  explicit QuboMatrix(std::size_t n);
  /// Accepts any square finite matrix and symmetrizes it into upper form.
  explicit QuboMatrix(const std::vector<std::vector<double>>& rows);
  QuboMatrix(std::initializer_list<std::vector<double>> rows)
      : QuboMatrix(std::vector<std::vector<double>>(rows)) {}

  static QuboMatrix from_json(const json& rows);
  json to_json() const;

  std::size_t size() const noexcept { return n_; }

  /// Upper-triangular coefficient; (i, j) and (j, i) address the same slot.
  double at(std::size_t i, std::size_t j) const;
  /// Adds to the canonical slot of (i, j).
  void add(std::size_t i, std::size_t j, double value);
  void set(std::size_t i, std::size_t j, double value);

  /// Number of nonzero slots among the n(n+1)/2 upper-triangular entries.
  std::size_t nonzero_slots() const;
  std::size_t nonzero_off_diagonal() const;
  bool is_zero() const;

  const std::vector<double>& data() const noexcept { return entries_; }

  friend bool operator==(const QuboMatrix&, const QuboMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;  // row-major n*n, lower part zero
};

/// Sum over i <= j of x_i Q_ij x_j.
double qubo_objective(const QuboMatrix& q, std::span<const std::uint8_t> x);

/// Objective for every basis state, indexed by the integer encoding of x.
std::vector<double> qubo_energies(const QuboMatrix& q);

struct Optimum {
  Bitstring bits;
  double value = 0.0;
};

inline constexpr std::size_t kBruteForceCap = 20;

/// Exhaustive minimum over all 2^n assignments; ties go to the lowest index.
Optimum brute_force_optimum(const QuboMatrix& q, std::size_t cap = kBruteForceCap);

/// Random QUBO with round(density * n(n+1)/2) nonzero upper slots, values
/// uniform in [-1, 1] excluding zero. Deterministic per seed.
QuboMatrix random_qubo(std::size_t n, double density, std::uint64_t seed);

/// Population standard deviation of the objective over uniformly random
/// bitstrings (closed form, O(n^2)).
double uniform_loss_stddev(const QuboMatrix& q);
double uniform_loss_mean(const QuboMatrix& q);

/// Fraction of nonzero upper-triangular slots, diagonal included.
double qubo_density(const QuboMatrix& q);

}  // namespace qdt::problem
