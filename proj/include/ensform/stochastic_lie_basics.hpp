#pragma once

#include <utility>
#include <vector>

#include "ensform/digraph.hpp"
#include "ensform/int_matrix.hpp"

namespace ensform {

/// Edge generator: +1 at (i, j), -1 at (i, i), zero elsewhere (1-indexed).
/// Zero row sums, trace -1.
inline IntMatrix primary_matrix(int n, int i, int j) {
  if (i < 1 || i > n || j < 1 || j > n)
    throw std::invalid_argument("primary_matrix: vertex index out of range");
  if (i == j) throw std::invalid_argument("primary_matrix: requires i != j");
  IntMatrix m(n);
  m(i - 1, j - 1) = 1;
  m(i - 1, i - 1) = -1;
  return m;
}

/// One generator per edge, in sorted edge order.
inline MatrixSet s_g(const Digraph& g) {
  MatrixSet s;
  for (auto [i, j] : g.edges()) s.insert(primary_matrix(g.n_vertices(), i, j));
  return s;
}

/// An element of the spanning set together with how it was first produced.
/// kind Reversal: A(j,k) - A(k,j) for edge (j, k); kind Redirect:
/// A(i,k) - A(i,j) for edge (j, k) and a third vertex i.
struct StarElement {
  enum class Kind { Reversal, Redirect };
  Kind kind;
  int j, k;  // the generating edge
  int i;     // redirecting vertex (Redirect only, else 0)
  IntMatrix value;
};

/// Deterministic enumeration of the spanning set: edges in sorted order; per
/// edge first the reversal difference, then the redirect differences with i
/// ascending over vertices outside {j, k}. Duplicates keep their first
/// provenance.
inline std::vector<StarElement> s_star_g_elements(const Digraph& g) {
  const int n = g.n_vertices();
  if (n < 3) throw std::invalid_argument("s_star_g: requires at least 3 vertices");
  std::vector<StarElement> out;
  MatrixSet seen;
  for (auto [j, k] : g.edges()) {
    IntMatrix rev = primary_matrix(n, j, k) - primary_matrix(n, k, j);
    if (seen.insert(rev)) out.push_back({StarElement::Kind::Reversal, j, k, 0, rev});
    for (int i = 1; i <= n; ++i) {
      if (i == j || i == k) continue;
      IntMatrix red = primary_matrix(n, i, k) - primary_matrix(n, i, j);
      if (seen.insert(red)) out.push_back({StarElement::Kind::Redirect, j, k, i, red});
    }
  }
  return out;
}

inline MatrixSet s_star_g(const Digraph& g) {
  MatrixSet s;
  for (const auto& e : s_star_g_elements(g)) s.insert(e.value);
  return s;
}

}  // namespace ensform
