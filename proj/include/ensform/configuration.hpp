#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <utility>
#include <vector>

#include "ensform/errors.hpp"
#include "ensform/int_matrix.hpp"
#include "ensform/stochastic_lie_basics.hpp"

namespace ensform {

/// Agent positions, one row per agent.
using Configuration = Eigen::MatrixXd;

inline Eigen::MatrixXd to_dense(const IntMatrix& m) {
  Eigen::MatrixXd d(m.size(), m.size());
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) d(i, j) = static_cast<double>(m(i, j));
  return d;
}

inline constexpr double kDefaultRankTol = 1e-10;

namespace detail {

inline int numerical_rank(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) > tol * sv(0)) ++r;
  return r;
}

inline Eigen::MatrixXd difference_matrix(const Configuration& x) {
  const int n_agents = static_cast<int>(x.rows());
  Eigen::MatrixXd d(n_agents - 1, x.cols());
  for (int i = 1; i < n_agents; ++i) d.row(i - 1) = x.row(i) - x.row(0);
  return d;
}

}  // namespace detail

/// A configuration is nondegenerate when the relative positions seen from
/// agent 1 span the whole ambient space, i.e. no proper affine subspace
/// contains all agents.
inline bool is_nondegenerate(const Configuration& x, double tol = kDefaultRankTol) {
  if (x.rows() < 2) throw std::invalid_argument("is_nondegenerate: needs at least 2 agents");
  if (!x.allFinite()) throw std::invalid_argument("is_nondegenerate: non-finite entries");
  return detail::numerical_rank(detail::difference_matrix(x), tol) == x.cols();
}

/// Indices (1-based) of n+1 agents whose sub-configuration is a full
/// simplex. Greedy: scan agents in index order and keep those that raise the
/// rank of the relative-position matrix.
inline std::vector<int> simplex_subset(const Configuration& x, double tol = kDefaultRankTol) {
  const int n = static_cast<int>(x.cols());
  if (!is_nondegenerate(x, tol))
    throw HypothesisError("simplex_subset: configuration is degenerate");
  std::vector<int> chosen{1};
  Eigen::MatrixXd diffs(0, n);
  for (int i = 2; i <= static_cast<int>(x.rows()) && static_cast<int>(chosen.size()) < n + 1;
       ++i) {
    Eigen::MatrixXd trial(diffs.rows() + 1, n);
    trial.topRows(diffs.rows()) = diffs;
    trial.row(diffs.rows()) = x.row(i - 1) - x.row(chosen.front() - 1);
    if (detail::numerical_rank(trial, tol) > detail::numerical_rank(diffs, tol)) {
      diffs = std::move(trial);
      chosen.push_back(i);
    }
  }
  if (static_cast<int>(chosen.size()) != n + 1)
    throw HypothesisError("simplex_subset: could not extend to a full simplex");
  return chosen;
}

struct SpanReport {
  int rank = 0;
  std::vector<double> singular_values;  // descending
  std::vector<int> basis_indices;       // indices into the generator list (0-based)
};

/// Numerical rank of { A_i * X } viewed as vectors of length N*n, for the
/// given generator matrices.
inline SpanReport span_rank(const Configuration& x, const std::vector<IntMatrix>& basis,
                            double tol = kDefaultRankTol) {
  const int nn = static_cast<int>(x.rows() * x.cols());
  Eigen::MatrixXd images(nn, static_cast<int>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    Eigen::MatrixXd img = to_dense(basis[k]) * x;
    images.col(static_cast<int>(k)) =
        Eigen::Map<Eigen::VectorXd>(img.data(), img.size());
  }
  SpanReport rep;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(images);
  for (int k = 0; k < svd.singularValues().size(); ++k)
    rep.singular_values.push_back(svd.singularValues()(k));
  rep.rank = detail::numerical_rank(images, tol);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(images);
  for (int k = 0; k < rep.rank && k < images.cols(); ++k)
    rep.basis_indices.push_back(static_cast<int>(qr.colsPermutation().indices()(k)));
  return rep;
}

/// Constructive full-rank generator family for a nondegenerate configuration
/// with N > n+1: exactly N*n zero-trace zero-row-sum matrices A together
/// with their images A*X, linearly independent by construction. The family
/// consists of differences of edge generators: pairs (i, j) inside a
/// nondegenerate (N-1)-agent subset anchored against the left-out agent, and
/// redirections of the left-out agent across a simplex subset.
inline std::vector<std::pair<IntMatrix, Eigen::MatrixXd>> constructive_basis(
    const Configuration& x, double tol = kDefaultRankTol) {
  const int big_n = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  if (big_n <= n + 1)
    throw std::invalid_argument("constructive_basis: requires N > n+1");
  if (!is_nondegenerate(x, tol))
    throw HypothesisError("constructive_basis: configuration is degenerate");

  // Smallest-index (N-1)-subset whose sub-configuration stays nondegenerate;
  // h is the left-out agent. Subsets in lexicographic order drop the largest
  // agent first.
  int h = -1;
  std::vector<int> rest;
  for (int drop = big_n; drop >= 1; --drop) {
    std::vector<int> candidate;
    for (int i = 1; i <= big_n; ++i)
      if (i != drop) candidate.push_back(i);
    Eigen::MatrixXd sub(big_n - 1, n);
    for (std::size_t r = 0; r < candidate.size(); ++r) sub.row(r) = x.row(candidate[r] - 1);
    if (is_nondegenerate(sub, tol)) {
      h = drop;
      rest = candidate;
      break;
    }
  }
  if (h < 0) throw HypothesisError("constructive_basis: no nondegenerate (N-1)-subset");

  Eigen::MatrixXd sub(big_n - 1, n);
  for (std::size_t r = 0; r < rest.size(); ++r) sub.row(r) = x.row(rest[r] - 1);

  std::vector<std::pair<IntMatrix, Eigen::MatrixXd>> out;
  const int anchor = rest.front();

  // Pairs (i, j) within the retained subset, anchored by the generator from
  // the left-out agent to keep the trace zero; their top blocks are the edge
  // generator images of the sub-configuration, of which n(N-1) independent
  // ones exist. Greedy selection in lexicographic pair order.
  {
    Eigen::MatrixXd picked(0, n * (big_n - 1));
    for (int i : rest) {
      for (int j : rest) {
        if (i == j) continue;
        if (static_cast<int>(out.size()) == n * (big_n - 1)) break;
        IntMatrix a = primary_matrix(big_n, i, j) - primary_matrix(big_n, h, anchor);
        Eigen::MatrixXd img = to_dense(a) * x;
        // independence is judged on the top block, i.e. rows of the subset
        Eigen::MatrixXd top(rest.size(), n);
        for (std::size_t r = 0; r < rest.size(); ++r) top.row(r) = img.row(rest[r] - 1);
        Eigen::MatrixXd trial(picked.rows() + 1, picked.cols());
        trial.topRows(picked.rows()) = picked;
        trial.row(picked.rows()) =
            Eigen::Map<Eigen::VectorXd>(top.data(), top.size()).transpose();
        if (detail::numerical_rank(trial, tol) > static_cast<int>(picked.rows())) {
          picked = std::move(trial);
          out.emplace_back(std::move(a), std::move(img));
        }
      }
    }
    if (static_cast<int>(out.size()) != n * (big_n - 1))
      throw NumericError("constructive_basis: top-block family is rank deficient at tolerance");
  }

  // Redirections of the left-out agent across a simplex inside the retained
  // subset; their images live entirely in the left-out agent's row.
  {
    std::vector<int> simplex_local = simplex_subset(sub, tol);
    std::vector<int> simplex;  // back to original agent indices
    for (int s : simplex_local) simplex.push_back(rest[s - 1]);
    const int apex = simplex.back();
    for (int k = 0; k < n; ++k) {
      IntMatrix a = primary_matrix(big_n, h, apex) - primary_matrix(big_n, h, simplex[k]);
      Eigen::MatrixXd img = to_dense(a) * x;
      out.emplace_back(std::move(a), std::move(img));
    }
  }

  // Full-family independence check.
  Eigen::MatrixXd all(static_cast<int>(out.size()), big_n * n);
  for (std::size_t r = 0; r < out.size(); ++r) {
    Eigen::MatrixXd img = out[r].second;
    all.row(static_cast<int>(r)) = Eigen::Map<Eigen::VectorXd>(img.data(), img.size());
  }
  if (detail::numerical_rank(all, tol) != big_n * n)
    throw NumericError("constructive_basis: images are not independent at tolerance");
  return out;
}

}  // namespace ensform
