#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ensform/bracket_word.hpp"
#include "ensform/digraph.hpp"
#include "ensform/exact_linalg.hpp"
#include "ensform/int_matrix.hpp"
#include "ensform/stochastic_lie_basics.hpp"

namespace ensform {

/// Enumeration guards for the iterated-commutator sets, which can grow
/// combinatorially past desk scale.
struct LieCaps {
  int max_vertices = 6;
  int max_depth = 8;
  std::size_t max_set_size = 2'000'000;
};

/// Dimension of the zero-trace ideal of the zero-row-sum algebra.
inline int commutator_ideal_dim(int n) { return n * (n - 1) - 1; }

/// [A(i,j), M] for an edge generator, computed in O(N) touched entries:
/// the left product only fills row i with row_j(M) - row_i(M), the right
/// product only moves column i of M into columns j and i. Entry magnitudes
/// grow by at most a factor 3 per application, so no overflow check is
/// needed at admissible depths.
inline IntMatrix commutator_with_primary(int i, int j, const IntMatrix& m) {
  const int n = m.size();
  const int a = i - 1, b = j - 1;
  IntMatrix r(n);
  for (int c = 0; c < n; ++c) r(a, c) = m(b, c) - m(a, c);
  for (int row = 0; row < n; ++row) {
    const long long v = m(row, a);
    r(row, b) -= v;
    r(row, a) += v;
  }
  return r;
}

struct AdLevels {
  std::vector<MatrixSet> levels;         // levels[k] = evaluated depth-k products
  std::vector<long long> zero_products;  // zero evaluations dropped at each depth
};

/// Evaluated Lie products of depth 0..k with left factors drawn from the
/// edge generators. Depth 0 is the generator set itself. Zero evaluations
/// are dropped from the stored sets but tallied. Deterministic: previous
/// level in insertion order, edges in sorted order.
inline AdLevels ad_levels(const Digraph& g, int k, const LieCaps& caps = {}) {
  if (k < 0) throw std::invalid_argument("ad_levels: depth must be nonnegative");
  if (g.n_vertices() > caps.max_vertices)
    throw ResourceCapError("ad_levels: vertex count exceeds enumeration cap");
  if (k > caps.max_depth) throw ResourceCapError("ad_levels: depth exceeds enumeration cap");
  AdLevels out;
  out.levels.push_back(s_g(g));
  out.zero_products.push_back(0);
  for (int depth = 1; depth <= k; ++depth) {
    MatrixSet next;
    long long zeros = 0;
    for (const IntMatrix& m : out.levels.back()) {
      for (auto [i, j] : g.edges()) {
        IntMatrix c = commutator_with_primary(i, j, m);
        if (c.is_zero()) {
          ++zeros;
          continue;
        }
        next.insert(c);
        if (next.size() > caps.max_set_size)
          throw ResourceCapError("ad_levels: set size exceeds enumeration cap");
      }
    }
    out.levels.push_back(std::move(next));
    out.zero_products.push_back(zeros);
  }
  return out;
}

inline MatrixSet ad_set(const Digraph& g, int k, const LieCaps& caps = {}) {
  return std::move(ad_levels(g, k, caps).levels.back());
}

struct ContainsReport {
  bool contained = true;
  std::vector<IntMatrix> missing;
};

inline ContainsReport contains_set(const MatrixSet& superset, const MatrixSet& subset) {
  ContainsReport rep;
  for (const auto& m : subset)
    if (!superset.contains(m)) {
      rep.contained = false;
      rep.missing.push_back(m);
    }
  return rep;
}

/// Rank of the set viewed as vectors of length N^2, by fraction-free
/// elimination in exact arithmetic.
inline int rank_span(const MatrixSet& s) { return exact_rank(s.elements()); }

struct WitnessEntry {
  IntMatrix target;
  std::pair<int, int> generator_edge;  // element of the generator set
  IntMatrix source;                    // element of the spanning set
  bool closed_form = true;
};

struct SemiCodistReport {
  bool passed = false;
  int rank = 0;
  int expected_rank = 0;
  std::vector<WitnessEntry> witnesses;
  std::vector<IntMatrix> unwitnessed;
};

/// Checks that the spanning set derived from the edge set (a) has full rank
/// N(N-1)-1 and (b) reproduces each of its elements as a bracket of one edge
/// generator with one set element, with unit coefficient. Witnesses are
/// taken from the closed forms of the generating edge first, then searched
/// exhaustively.
inline SemiCodistReport verify_semi_codistinguished(const Digraph& g) {
  if (g.n_vertices() < 3)
    throw std::invalid_argument("verify_semi_codistinguished: requires N >= 3");
  if (!g.is_strongly_connected())
    throw HypothesisError("verify_semi_codistinguished: digraph is not strongly connected");
  const auto elements = s_star_g_elements(g);
  SemiCodistReport rep;
  rep.expected_rank = commutator_ideal_dim(g.n_vertices());
  {
    std::vector<IntMatrix> vals;
    for (const auto& e : elements) vals.push_back(e.value);
    rep.rank = exact_rank(vals);
  }
  for (const auto& e : elements) {
    // Bracketing with the generator of the element's own edge fixes it.
    if (commutator_with_primary(e.j, e.k, e.value) == e.value) {
      rep.witnesses.push_back({e.value, {e.j, e.k}, e.value, true});
      continue;
    }
    bool found = false;
    for (auto [i, j] : g.edges()) {
      for (const auto& s : elements) {
        if (commutator_with_primary(i, j, s.value) == e.value) {
          rep.witnesses.push_back({e.value, {i, j}, s.value, false});
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (!found) rep.unwitnessed.push_back(e.value);
  }
  rep.passed = rep.rank == rep.expected_rank && rep.unwitnessed.empty();
  return rep;
}

namespace detail {

/// Independent spanning elements in enumeration order, each with a
/// constructive word at its natural depth.
inline std::vector<std::pair<StarElement, BracketWord>> codist_words(const Digraph& g) {
  const int n = g.n_vertices();
  if (n < 3) throw std::invalid_argument("codist_basis: requires N >= 3");
  if (!g.is_strongly_connected())
    throw HypothesisError("codist_basis: digraph is not strongly connected");
  const int gamma = commutator_ideal_dim(n);
  std::vector<StarElement> selected;
  ExactSpanTracker tracker;
  for (const auto& e : s_star_g_elements(g)) {
    if (tracker.add(e.value)) {
      selected.push_back(e);
      if (static_cast<int>(selected.size()) == gamma) break;
    }
  }
  if (static_cast<int>(selected.size()) != gamma)
    throw HypothesisError(
        "codist_basis: the spanning set of this graph does not span the zero-trace ideal (rank " +
        std::to_string(tracker.rank()) + " of " + std::to_string(gamma) + ")");

  std::vector<std::pair<StarElement, BracketWord>> out;
  for (const auto& e : selected) {
    std::optional<BracketWord> word;
    if (e.kind == StarElement::Kind::Reversal) {
      if (g.has_edge(e.k, e.j)) {
        word = BracketWord::bracket(BracketWord::single({e.k, e.j}),
                                    BracketWord::single({e.j, e.k}));
      } else {
        word = bracket_word_for_cycle(g, g.cycle_through_edge(e.j, e.k));
      }
    } else {
      if (g.has_edge(e.i, e.j)) {
        word = BracketWord::bracket(BracketWord::single({e.i, e.j}),
                                    BracketWord::single({e.j, e.k}));
      } else {
        BracketWord w = bracket_word_for_path(g, g.shortest_path(e.i, e.j));
        w = BracketWord::bracket(BracketWord::single({e.j, e.k}), w);
        word = w.negated();
      }
    }
    if (!(word->evaluate(n) == e.value))
      throw std::logic_error("codist_basis: constructed word does not evaluate to its target");
    out.emplace_back(e, std::move(*word));
  }
  return out;
}

}  // namespace detail

/// Smallest uniform depth (at least the diameter) at which every selected
/// spanning element has a constructive word. Exceeds the diameter exactly
/// when some edge without a reverse edge has its shortest cycle longer than
/// the diameter.
inline int codist_min_depth(const Digraph& g) {
  int depth = g.diameter();
  for (const auto& [e, word] : detail::codist_words(g)) depth = std::max(depth, word.depth());
  return depth;
}

/// A spanning basis realized at uniform bracket depth: N(N-1)-1 words of
/// depth exactly m whose evaluations are the first independent elements of
/// the spanning set in its deterministic enumeration order. Depth is raised
/// to m by rebracketing with the element's own edge generator, which leaves
/// the evaluation fixed.
inline std::vector<std::pair<BracketWord, IntMatrix>> codist_basis(const Digraph& g, int m) {
  const int d = g.diameter();
  if (m < d) throw std::invalid_argument("codist_basis: depth must be at least the diameter");
  const int n = g.n_vertices();
  std::vector<std::pair<BracketWord, IntMatrix>> out;
  for (auto& [e, word] : detail::codist_words(g)) {
    if (word.depth() > m)
      throw HypothesisError(
          "codist_basis: a spanning element needs bracket depth " +
          std::to_string(word.depth()) + " > " + std::to_string(m) +
          "; shortest cycle through an edge exceeds the diameter bound on this graph");
    BracketWord w = word;
    while (w.depth() < m) w = BracketWord::bracket(BracketWord::single({e.j, e.k}), w);
    if (!(w.evaluate(n) == e.value))
      throw std::logic_error("codist_basis: depth wrap changed the evaluation");
    out.emplace_back(std::move(w), e.value);
  }
  return out;
}

/// Canonical integer basis of the zero-trace zero-row-sum ideal: pairwise
/// differences of edge generators against a fixed one.
inline std::vector<IntMatrix> ideal_basis(int n) {
  if (n < 2) throw std::invalid_argument("ideal_basis: requires N >= 2");
  std::vector<IntMatrix> out;
  const IntMatrix ref = primary_matrix(n, 1, 2);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j || (i == 1 && j == 2)) continue;
      out.push_back(primary_matrix(n, i, j) - ref);
    }
  return out;
}

/// Exact rational matrix; only needed for the rank-one center direction
/// I - (1/N) * ones.
struct RationalMatrix {
  int n = 0;
  std::vector<mpq_class> a;
  mpq_class& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const mpq_class& operator()(int i, int j) const {
    return a[static_cast<std::size_t>(i) * n + j];
  }
};

inline RationalMatrix center_projector(int n) {
  RationalMatrix z;
  z.n = n;
  z.a.assign(static_cast<std::size_t>(n) * n, mpq_class(-1, n));
  for (int i = 0; i < n; ++i) z(i, i) += 1;
  return z;
}

struct LeviReport {
  int n = 0;
  int dim_zero_row_sum = 0;      // N(N-1)
  int dim_commutator_ideal = 0;  // N(N-1)-1
  int dim_semisimple_part = 0;   // (N-1)^2-1
  int dim_radical = 0;           // N-1
  bool commutator_span_is_ideal = false;
  bool ideal_is_perfect = false;
  bool semisimple_part_ok = false;
  bool radical_ok = false;
  bool mixed_bracket_in_radical = false;
  bool direct_sum = false;
  bool full_space_split = false;
  bool passed = false;
};

/// Structural checks on the zero-row-sum algebra by exact linear algebra on
/// canonical integer bases: the commutator span equals the zero-trace ideal,
/// the ideal is perfect, and it splits into a semisimple part (zero column
/// sums, zero trace) plus an abelian radical of rank-one matrices, with the
/// whole algebra recovered by adjoining the center direction.
inline LeviReport levi_check(int n) {
  if (n < 3) throw std::invalid_argument("levi_check: requires N >= 3");
  LeviReport rep;
  rep.n = n;
  rep.dim_zero_row_sum = n * (n - 1);
  rep.dim_commutator_ideal = commutator_ideal_dim(n);
  rep.dim_semisimple_part = (n - 1) * (n - 1) - 1;
  rep.dim_radical = n - 1;

  std::vector<IntMatrix> basis_full;  // zero-row-sum basis
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j) basis_full.push_back(primary_matrix(n, i, j));

  const std::vector<IntMatrix> basis_ideal = ideal_basis(n);  // zero-trace sub-basis

  auto in_ideal = [](const IntMatrix& m) {
    return m.has_zero_row_sums() && m.trace() == 0;
  };

  // (a) span of all commutators of the full algebra == the zero-trace ideal
  {
    std::vector<IntMatrix> comms;
    for (const auto& a : basis_full)
      for (const auto& b : basis_full) {
        IntMatrix c = commutator(a, b);
        if (!c.is_zero()) comms.push_back(c);
      }
    bool all_in = true;
    ExactSpanTracker span;
    for (const auto& c : comms) {
      all_in = all_in && in_ideal(c);
      span.add(c);
    }
    bool covers = true;
    for (const auto& b : basis_ideal) covers = covers && span.in_span(b);
    rep.commutator_span_is_ideal =
        all_in && covers && span.rank() == rep.dim_commutator_ideal;
  }

  // (b) the ideal is perfect
  {
    ExactSpanTracker span;
    for (const auto& a : basis_ideal)
      for (const auto& b : basis_ideal) span.add(commutator(a, b));
    rep.ideal_is_perfect = span.rank() == rep.dim_commutator_ideal;
  }

  // Semisimple part: zero row and column sums, zero trace. Integer basis
  // from B(i,j) = (e_i - e_n)(e_j - e_n)^T, trace-reduced against B(1,1).
  std::vector<IntMatrix> semi;
  {
    auto b_of = [&](int i, int j) {
      IntMatrix m(n);
      m(i, j) = 1;
      m(i, n - 1) = -1;
      m(n - 1, j) = -1;
      m(n - 1, n - 1) = 1;
      return m;
    };
    const IntMatrix b11 = b_of(0, 0);
    for (int i = 0; i < n - 1; ++i)
      for (int j = 0; j < n - 1; ++j) {
        if (i == 0 && j == 0) continue;
        semi.push_back(2 * b_of(i, j) - (i == j ? 2 : 1) * b11);
      }
  }

  // Radical: rank-one matrices with constant columns summing to zero.
  std::vector<IntMatrix> rad;
  for (int i = 0; i < n - 1; ++i) {
    IntMatrix m(n);
    for (int r = 0; r < n; ++r) {
      m(r, i) = 1;
      m(r, n - 1) = -1;
    }
    rad.push_back(m);
  }

  // (c) dimension and bracket closure of the semisimple part
  {
    bool shape = true;
    ExactSpanTracker span;
    for (const auto& m : semi) {
      shape = shape && in_ideal(m) && m.has_zero_column_sums();
      span.add(m);
    }
    bool closed = true;
    for (const auto& a : semi)
      for (const auto& b : semi) closed = closed && span.in_span(commutator(a, b));
    rep.semisimple_part_ok =
        shape && closed && span.rank() == rep.dim_semisimple_part;
  }

  // (d) dimension of the radical and commutativity
  {
    ExactSpanTracker span;
    bool shape = true, abelian = true;
    for (const auto& m : rad) {
      shape = shape && in_ideal(m);
      span.add(m);
    }
    for (const auto& a : rad)
      for (const auto& b : rad) abelian = abelian && commutator(a, b).is_zero();
    rep.radical_ok = shape && abelian && span.rank() == rep.dim_radical;
  }

  // (e) bracketing the two parts lands in the radical
  {
    ExactSpanTracker span;
    for (const auto& m : rad) span.add(m);
    bool ok = true;
    for (const auto& a : semi)
      for (const auto& b : rad) ok = ok && span.in_span(commutator(a, b));
    rep.mixed_bracket_in_radical = ok;
  }

  // (f) the two parts jointly span the ideal and intersect trivially
  {
    ExactSpanTracker span;
    int r = 0;
    for (const auto& m : semi) r += span.add(m) ? 1 : 0;
    for (const auto& m : rad) r += span.add(m) ? 1 : 0;
    rep.direct_sum = r == rep.dim_commutator_ideal &&
                     rep.dim_semisimple_part + rep.dim_radical == rep.dim_commutator_ideal;
  }

  // (g) ideal plus the (scaled) center direction recovers the full algebra
  {
    IntMatrix nz(n);  // n * (I - ones/n), integer form of the center direction
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) nz(i, j) = (i == j ? n : 0) - 1;
    ExactSpanTracker span;
    for (const auto& m : basis_ideal) span.add(m);
    bool indep = span.add(nz);
    bool covers = true;
    for (const auto& m : basis_full) covers = covers && span.in_span(m);
    rep.full_space_split =
        indep && covers && nz.has_zero_row_sums() && span.rank() == rep.dim_zero_row_sum;
  }

  rep.passed = rep.commutator_span_is_ideal && rep.ideal_is_perfect &&
               rep.semisimple_part_ok && rep.radical_ok && rep.mixed_bracket_in_radical &&
               rep.direct_sum && rep.full_space_split;
  return rep;
}

}  // namespace ensform
