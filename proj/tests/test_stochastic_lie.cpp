#include <catch2/catch_amalgamated.hpp>

#include "ensform/rng.hpp"
#include "ensform/stochastic_lie.hpp"

using namespace ensform;

namespace {

const std::vector<std::array<int, 3>> kCyclicTriples{{1, 2, 3}, {2, 3, 1}, {3, 1, 2}};

IntMatrix a3(int i, int j) { return primary_matrix(3, i, j); }

// Expected iterated-commutator sets of the 3-cycle, written out pattern by
// pattern: depth 1 is +/- {A_ik - A_ij}; depth 2 adds {A_ik - A_kj}; depth 3
// is +/- {A_ij - A_ji, A_ik - A_ij, A_ik - A_kj, 2A_ij - A_ik - A_ji}, each
// over cyclic relabelings of (1,2,3).
MatrixSet expected_ad(int depth) {
  MatrixSet s;
  auto push_pm = [&s](const IntMatrix& m) {
    s.insert(m);
    s.insert(-m);
  };
  for (auto [i, j, k] : kCyclicTriples) {
    if (depth == 1 || depth == 2) push_pm(a3(i, k) - a3(i, j));
    if (depth == 2) push_pm(a3(i, k) - a3(k, j));
    if (depth == 3) {
      push_pm(a3(i, j) - a3(j, i));
      push_pm(a3(i, k) - a3(i, j));
      push_pm(a3(i, k) - a3(k, j));
      push_pm(2 * a3(i, j) - a3(i, k) - a3(j, i));
    }
  }
  return s;
}

MatrixSet expected_star_3cycle() {
  MatrixSet s;
  s.insert(a3(1, 2) - a3(2, 1));
  s.insert(a3(2, 3) - a3(3, 2));
  s.insert(a3(3, 1) - a3(1, 3));
  s.insert(a3(1, 3) - a3(1, 2));
  s.insert(a3(2, 1) - a3(2, 3));
  s.insert(a3(3, 2) - a3(3, 1));
  return s;
}

}  // namespace

TEST_CASE("generator set per edge") {
  Digraph cyc = Digraph::cycle(3);
  MatrixSet s = s_g(cyc);
  CHECK(s.size() == 3);
  CHECK(s.contains(a3(1, 2)));
  CHECK(s.contains(a3(2, 3)));
  CHECK(s.contains(a3(3, 1)));
  CHECK(s_g(Digraph(3, {})).empty());
  CHECK(s_g(Digraph::complete(3)).size() == 6);
}

TEST_CASE("spanning set of the 3-cycle matches the six displayed matrices") {
  MatrixSet star = s_star_g(Digraph::cycle(3));
  CHECK(star.set_equals(expected_star_3cycle()));
  CHECK(rank_span(star) == 5);
}

TEST_CASE("spanning set of the complete graph on 3 vertices collapses to the same six") {
  CHECK(s_star_g(Digraph::complete(3)).set_equals(expected_star_3cycle()));
  CHECK_THROWS_AS(s_star_g(Digraph(2, {{1, 2}, {2, 1}})), std::invalid_argument);
}

TEST_CASE("iterated commutator sets of the 3-cycle match the worked example") {
  Digraph cyc = Digraph::cycle(3);
  AdLevels lv = ad_levels(cyc, 3);
  CHECK(lv.levels[0].set_equals(s_g(cyc)));
  for (int depth : {1, 2, 3}) {
    CAPTURE(depth);
    CHECK(lv.levels[depth].set_equals(expected_ad(depth)));
  }
  MatrixSet star = s_star_g(cyc);
  CHECK(contains_set(lv.levels[3], star).contained);
  CHECK_FALSE(contains_set(lv.levels[2], star).contained);
  CHECK_FALSE(contains_set(lv.levels[1], star).contained);
  // depth-1 set has six elements, none of them a reversal difference
  CHECK(lv.levels[1].size() == 6);
  CHECK_FALSE(lv.levels[1].contains(a3(1, 2) - a3(2, 1)));
}

TEST_CASE("containment report lists missing elements") {
  MatrixSet empty;
  MatrixSet one;
  one.insert(a3(1, 2));
  CHECK(contains_set(one, empty).contained);
  CHECK(contains_set(empty, empty).contained);
  auto rep = contains_set(empty, one);
  CHECK_FALSE(rep.contained);
  REQUIRE(rep.missing.size() == 1);
  CHECK(rep.missing[0] == a3(1, 2));
}

TEST_CASE("enumeration caps raise resource errors") {
  CHECK_THROWS_AS(ad_levels(Digraph::cycle(7), 1), ResourceCapError);
  CHECK_THROWS_AS(ad_levels(Digraph::cycle(3), 9), ResourceCapError);
  LieCaps tiny;
  tiny.max_set_size = 4;
  CHECK_THROWS_AS(ad_levels(Digraph::cycle(3), 2, tiny), ResourceCapError);
}

TEST_CASE("rank of generator spans") {
  MatrixSet single;
  single.insert(a3(1, 2));
  CHECK(rank_span(single) == 1);
  CHECK(rank_span(MatrixSet{}) == 0);
  // the complete-graph generators span the whole zero-row-sum algebra
  CHECK(rank_span(s_g(Digraph::complete(4))) == 12);
}

TEST_CASE("ideal basis has the right size and shape") {
  for (int n : {3, 4, 5}) {
    auto basis = ideal_basis(n);
    CHECK(static_cast<int>(basis.size()) == commutator_ideal_dim(n));
    for (const auto& m : basis) {
      CHECK(m.trace() == 0);
      CHECK(m.has_zero_row_sums());
    }
    CHECK(exact_rank(basis) == commutator_ideal_dim(n));
  }
}

TEST_CASE("negation symmetry of the commutator sets") {
  for (int n : {3, 4}) {
    DeterministicRng rng(23 + n);
    Digraph g = random_strongly_connected(rng, n);
    AdLevels lv = ad_levels(g, 4);
    for (int k = 1; k <= 4; ++k) REQUIRE(lv.levels[k].set_equals(lv.levels[k].negated()));
  }
}

TEST_CASE("semi-codistinguished verification on the 3-cycle") {
  auto rep = verify_semi_codistinguished(Digraph::cycle(3));
  CHECK(rep.passed);
  CHECK(rep.rank == 5);
  CHECK(rep.witnesses.size() == 6);
  CHECK(rep.unwitnessed.empty());
  // the proof's closed form: bracketing with the edge generator fixes the
  // reversal difference
  bool found = false;
  for (const auto& w : rep.witnesses) {
    if (w.target == a3(2, 3) - a3(3, 2)) {
      found = true;
      CHECK(w.generator_edge == std::make_pair(2, 3));
      CHECK(w.source == w.target);
    }
  }
  CHECK(found);
  CHECK_THROWS_AS(verify_semi_codistinguished(Digraph(3, {{1, 2}, {2, 3}})), HypothesisError);
}

TEST_CASE("spanning-set rank can be deficient on star-like graphs") {
  // documented deviation from the source theorem: every path from 2 to 3
  // passes through the redirect vertex 1, and the set fails to span
  Digraph hub(3, {{1, 2}, {1, 3}, {2, 1}, {3, 1}});
  REQUIRE(hub.is_strongly_connected());
  CHECK(rank_span(s_star_g(hub)) == 4);
  auto rep = verify_semi_codistinguished(hub);
  CHECK_FALSE(rep.passed);
  CHECK(rep.rank == 4);
  CHECK(rep.expected_rank == 5);
}

TEST_CASE("containment can start one past the diameter") {
  // edge (1,2) has no reverse edge and its shortest cycle is longer than the
  // diameter, so depth d misses the reversal difference
  Digraph g(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 1}, {3, 2}, {4, 3}, {1, 5}});
  REQUIRE(g.diameter() == 4);
  AdLevels lv = ad_levels(g, 6);
  MatrixSet star = s_star_g(g);
  CHECK_FALSE(contains_set(lv.levels[4], star).contained);
  CHECK(contains_set(lv.levels[5], star).contained);
  CHECK(contains_set(lv.levels[6], star).contained);
  CHECK(codist_min_depth(g) == 5);
}

TEST_CASE("levi decomposition checks") {
  auto rep3 = levi_check(3);
  CHECK(rep3.passed);
  CHECK(rep3.dim_commutator_ideal == 5);
  CHECK(rep3.dim_semisimple_part == 3);
  CHECK(rep3.dim_radical == 2);

  auto rep4 = levi_check(4);
  CHECK(rep4.passed);
  CHECK(rep4.dim_commutator_ideal == 11);
  CHECK(rep4.dim_semisimple_part == 8);
  CHECK(rep4.dim_radical == 3);

  CHECK_THROWS_AS(levi_check(2), std::invalid_argument);
}

TEST_CASE("center direction is exact") {
  RationalMatrix z = center_projector(4);
  for (int i = 0; i < 4; ++i) {
    mpq_class row_sum = 0;
    for (int j = 0; j < 4; ++j) row_sum += z(i, j);
    CHECK(row_sum == 0);
    CHECK(z(i, i) == mpq_class(3, 4));
  }
}
