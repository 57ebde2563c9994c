#include <catch2/catch_amalgamated.hpp>

#include "ensform/bracket_word.hpp"
#include "ensform/rng.hpp"
#include "ensform/stochastic_lie.hpp"

using namespace ensform;

namespace {

IntMatrix a(int n, int i, int j) { return primary_matrix(n, i, j); }

std::vector<Digraph> all_strongly_connected(int n) {
  std::vector<std::pair<int, int>> all;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j) all.push_back({i, j});
  std::vector<Digraph> out;
  for (unsigned long mask = 0; mask < (1ul << all.size()); ++mask) {
    std::vector<std::pair<int, int>> e;
    for (std::size_t b = 0; b < all.size(); ++b)
      if (mask >> b & 1) e.push_back(all[b]);
    Digraph g(n, std::move(e));
    if (g.is_strongly_connected()) out.push_back(std::move(g));
  }
  return out;
}

}  // namespace

TEST_CASE("word structure basics") {
  BracketWord w = BracketWord::bracket(BracketWord::single({1, 2}), BracketWord::single({2, 3}));
  CHECK(w.depth() == 1);
  CHECK(w.leaf_count() == 2);
  CHECK(w.is_right_comb());
  CHECK(w.to_string() == "[A1,2,A2,3]");
  CHECK(w.evaluate(3) == a(3, 1, 3) - a(3, 1, 2));
  CHECK(w.negated().evaluate(3) == a(3, 1, 2) - a(3, 1, 3));
  CHECK_THROWS_AS(BracketWord::single({1, 2}).negated(), std::invalid_argument);
}

TEST_CASE("path words follow the inductive construction") {
  Digraph path4(4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}});
  BracketWord w = bracket_word_for_path(path4, {1, 2, 3, 4});
  // the illustrated identity: [A34, [A23, A12]] = A14 - A13 at depth 2
  CHECK(w.to_string() == "[A3,4,[A2,3,A1,2]]");
  CHECK(w.depth() == 2);
  CHECK(w.evaluate(4) == a(4, 1, 4) - a(4, 1, 3));

  BracketWord w2 = bracket_word_for_path(path4, {1, 2, 3});
  CHECK(w2.evaluate(4) == a(4, 1, 3) - a(4, 1, 2));
  CHECK(w2.depth() == 1);

  CHECK_THROWS_AS(bracket_word_for_path(path4, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(bracket_word_for_path(path4, {1, 3, 4}), std::invalid_argument);
}

TEST_CASE("cycle words wrap a path word twice") {
  Digraph cyc4 = Digraph::cycle(4);
  BracketWord w = bracket_word_for_cycle(cyc4, {1, 2, 3, 4, 1});
  // the illustrated chain lands on A12 - A21 at depth 4
  CHECK(w.depth() == 4);
  CHECK(w.evaluate(4) == a(4, 1, 2) - a(4, 2, 1));
  CHECK(w.to_string() == "[A1,2,[A2,3,[A1,2,[A4,1,A3,4]]]]");

  Digraph cyc3 = Digraph::cycle(3);
  BracketWord w3 = bracket_word_for_cycle(cyc3, {1, 2, 3, 1});
  CHECK(w3.depth() == 3);
  CHECK(w3.evaluate(3) == a(3, 1, 2) - a(3, 2, 1));

  CHECK_THROWS_AS(bracket_word_for_cycle(Digraph::complete(3), {1, 2, 1}),
                  std::invalid_argument);
}

TEST_CASE("path and cycle words evaluate to their closed forms on every small graph") {
  for (int n : {3, 4}) {
    for (const Digraph& g : all_strongly_connected(n)) {
      for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
          if (i == j) continue;
          std::vector<int> p = g.shortest_path(i, j);
          const int l = static_cast<int>(p.size()) - 1;
          if (l < 2) continue;
          BracketWord w = bracket_word_for_path(g, p);
          REQUIRE(w.depth() == l - 1);
          REQUIRE(w.is_right_comb());
          REQUIRE(w.evaluate(n) == a(n, p[0], p[l]) - a(n, p[0], p[l - 1]));
        }
      }
      for (auto [i, j] : g.edges()) {
        std::vector<int> c = g.cycle_through_edge(i, j);
        const int len = static_cast<int>(c.size()) - 1;
        if (len < 3) continue;
        BracketWord w = bracket_word_for_cycle(g, c);
        REQUIRE(w.depth() == len);
        REQUIRE(w.evaluate(n) == a(n, i, j) - a(n, j, i));
      }
    }
  }
}

TEST_CASE("uniform-depth basis on the 3-cycle") {
  Digraph cyc = Digraph::cycle(3);
  auto basis3 = codist_basis(cyc, 3);
  REQUIRE(basis3.size() == 5);
  std::vector<IntMatrix> values;
  for (auto& [word, value] : basis3) {
    CHECK(word.depth() == 3);
    CHECK(word.evaluate(3) == value);
    values.push_back(value);
  }
  CHECK(exact_rank(values) == 5);

  // deeper uniform depth keeps the same evaluations
  auto basis5 = codist_basis(cyc, 5);
  REQUIRE(basis5.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(basis5[k].first.depth() == 5);
    CHECK(basis5[k].second == basis3[k].second);
  }

  CHECK_THROWS_AS(codist_basis(cyc, 2), std::invalid_argument);
}

TEST_CASE("uniform-depth basis across random graphs") {
  for (int n : {4, 5}) {
    DeterministicRng rng(100 + n);
    for (int trial = 0; trial < 5; ++trial) {
      Digraph g = random_strongly_connected(rng, n);
      int depth;
      try {
        depth = codist_min_depth(g);
      } catch (const HypothesisError&) {
        continue;  // spanning set may be rank deficient on some graphs
      }
      for (int m : {depth, depth + 1}) {
        auto basis = codist_basis(g, m);
        REQUIRE(static_cast<int>(basis.size()) == commutator_ideal_dim(n));
        std::vector<IntMatrix> values;
        for (auto& [word, value] : basis) {
          REQUIRE(word.depth() == m);
          REQUIRE(word.evaluate(n) == value);
          values.push_back(value);
        }
        REQUIRE(exact_rank(values) == commutator_ideal_dim(n));
      }
    }
  }
}

TEST_CASE("basis on a graph whose spanning set is rank deficient") {
  Digraph hub(3, {{1, 2}, {1, 3}, {2, 1}, {3, 1}});
  CHECK_THROWS_AS(codist_basis(hub, hub.diameter()), HypothesisError);
}
