#pragma once

#include <gmpxx.h>

#include <vector>

#include "ensform/int_matrix.hpp"

namespace ensform {

using ExactVector = std::vector<mpz_class>;

inline ExactVector flatten(const IntMatrix& m) {
  ExactVector v;
  v.reserve(m.entries().size());
  // gmpxx has no long long constructor; long is 64-bit on this target
  for (long long x : m.entries()) v.emplace_back(static_cast<long>(x));
  return v;
}

/// Rank of a list of integer row vectors by fraction-free (Bareiss) Gaussian
/// elimination. Intermediate entries are minors of the input, so arbitrary
/// precision is required; the input rows are consumed.
inline int exact_rank(std::vector<ExactVector> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  int rank = 0;
  mpz_class prev = 1;
  for (std::size_t col = 0; col < cols && rank < static_cast<int>(rows.size()); ++col) {
    std::size_t pivot = rows.size();
    for (std::size_t r = rank; r < rows.size(); ++r)
      if (rows[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    const ExactVector& prow = rows[rank];
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        mpz_class num = prow[col] * rows[r][j] - rows[r][col] * prow[j];
        mpz_divexact(rows[r][j].get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
      rows[r][col] = 0;
    }
    prev = prow[col];
    ++rank;
  }
  return rank;
}

inline int exact_rank(const std::vector<IntMatrix>& mats) {
  std::vector<ExactVector> rows;
  rows.reserve(mats.size());
  for (const auto& m : mats) rows.push_back(flatten(m));
  return exact_rank(std::move(rows));
}

/// Incremental exact rank tracker: feeds rows one at a time and reports
/// whether each enlarged the span. Used for deterministic greedy basis
/// selection out of enumerated generator sets.
class ExactSpanTracker {
 public:
  /// Returns true when v was independent of the rows accepted so far.
  bool add(ExactVector v) {
    // reduce v against the echelon rows
    for (const auto& [col, row] : echelon_) {
      if (v[col] == 0) continue;
      const mpz_class a = row[col];
      const mpz_class b = v[col];
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = a * v[j] - b * row[j];
    }
    std::size_t lead = v.size();
    for (std::size_t j = 0; j < v.size(); ++j)
      if (v[j] != 0) {
        lead = j;
        break;
      }
    if (lead == v.size()) return false;
    echelon_.emplace_back(lead, std::move(v));
    return true;
  }

  bool add(const IntMatrix& m) { return add(flatten(m)); }

  /// Membership in the span of the accepted rows.
  bool in_span(ExactVector v) const {
    for (const auto& [col, row] : echelon_) {
      if (v[col] == 0) continue;
      const mpz_class a = row[col];
      const mpz_class b = v[col];
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = a * v[j] - b * row[j];
    }
    for (const auto& x : v)
      if (x != 0) return false;
    return true;
  }

  bool in_span(const IntMatrix& m) const { return in_span(flatten(m)); }

  int rank() const { return static_cast<int>(echelon_.size()); }

 private:
  std::vector<std::pair<std::size_t, ExactVector>> echelon_;
};

}  // namespace ensform
