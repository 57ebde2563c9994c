#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <queue>

#include "ensform/digraph.hpp"

using namespace ensform;

namespace {

// Oracle: strong connectivity by forward + reverse BFS from vertex 1.
bool double_bfs_strongly_connected(const Digraph& g) {
  const int n = g.n_vertices();
  auto reach = [&](bool reversed) {
    std::vector<char> seen(n + 1, 0);
    std::queue<int> q;
    q.push(1);
    seen[1] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (auto [a, b] : g.edges()) {
        int from = reversed ? b : a, to = reversed ? a : b;
        if (from == v && !seen[to]) {
          seen[to] = 1;
          q.push(to);
        }
      }
    }
    return std::count(seen.begin() + 1, seen.end(), 1) == n;
  };
  return reach(false) && reach(true);
}

// Oracle: Floyd-Warshall all-pairs distances plus the shortest-cycle scan.
int floyd_warshall_diameter(const Digraph& g) {
  const int n = g.n_vertices();
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(n + 1, inf));
  for (auto [i, j] : g.edges()) d[i][j] = 1;
  for (int k = 1; k <= n; ++k)
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  int diam = 0;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) diam = std::max(diam, i == j ? d[i][i] : d[i][j]);
  return diam;
}

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

bool is_valid_path(const Digraph& g, const std::vector<int>& p) {
  for (std::size_t k = 0; k + 1 < p.size(); ++k)
    if (!g.has_edge(p[k], p[k + 1])) return false;
  std::vector<int> interior(p.begin(), p.end() - 1);
  std::sort(interior.begin(), interior.end());
  return std::adjacent_find(interior.begin(), interior.end()) == interior.end();
}

}  // namespace

TEST_CASE("out-neighbors") {
  Digraph cyc = Digraph::cycle(3);
  CHECK(cyc.out_neighbors(1) == std::vector<int>{2});
  Digraph empty(1, {});
  CHECK(empty.out_neighbors(1).empty());
  Digraph k4 = Digraph::complete(4);
  CHECK(k4.out_neighbors(2) == std::vector<int>{1, 3, 4});
  CHECK_THROWS_AS(cyc.out_neighbors(4), std::out_of_range);
}

TEST_CASE("strong connectivity agrees with the double-BFS oracle exhaustively") {
  CHECK(Digraph::cycle(3).is_strongly_connected());
  CHECK_FALSE(Digraph(3, {{1, 2}, {2, 3}}).is_strongly_connected());

  int count4 = 0;
  for (int n : {2, 3, 4}) {
    std::vector<std::pair<int, int>> all;
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        if (i != j) all.push_back({i, j});
    int count = 0;
    for (unsigned long mask = 0; mask < (1ul << all.size()); ++mask) {
      std::vector<std::pair<int, int>> e;
      for (std::size_t b = 0; b < all.size(); ++b)
        if (mask >> b & 1) e.push_back(all[b]);
      Digraph g(n, std::move(e));
      REQUIRE(g.is_strongly_connected() == double_bfs_strongly_connected(g));
      if (g.is_strongly_connected()) ++count;
    }
    if (n == 4) count4 = count;
  }
  CHECK(count4 == 1606);  // frozen from the oracle enumeration
}

TEST_CASE("diameter includes same-vertex cycles") {
  for (int n : {3, 4, 5, 6}) CHECK(Digraph::cycle(n).diameter() == n);
  CHECK(Digraph::complete(3).diameter() == 2);
  CHECK(Digraph::cycle(3).diameter() == 3);
  CHECK_THROWS_AS(Digraph(3, {{1, 2}, {2, 3}}).diameter(), HypothesisError);
}

TEST_CASE("diameter equals the Floyd-Warshall oracle on every small graph") {
  for (int n : {2, 3, 4})
    for (const Digraph& g : all_strongly_connected(n))
      REQUIRE(g.diameter() == floyd_warshall_diameter(g));
}

TEST_CASE("shortest paths and cycles") {
  Digraph cyc = Digraph::cycle(3);
  CHECK(cyc.shortest_path(1, 3) == std::vector<int>{1, 2, 3});
  CHECK(cyc.shortest_path(2, 2) == std::vector<int>{2, 3, 1, 2});
  CHECK(Digraph::complete(4).shortest_path(1, 3) == std::vector<int>{1, 3});
}

TEST_CASE("shortest-path outputs are valid, minimal and lexicographically smallest") {
  for (int n : {3, 4}) {
    for (const Digraph& g : all_strongly_connected(n)) {
      for (int i = 1; i <= n; ++i) {
        std::vector<int> dist = g.distances_to(i);
        for (int j = 1; j <= n; ++j) {
          std::vector<int> p = g.shortest_path(j, i);
          REQUIRE(is_valid_path(g, p));
          REQUIRE(p.front() == j);
          REQUIRE(p.back() == i);
          if (i != j) REQUIRE(static_cast<int>(p.size()) - 1 == dist[j]);
        }
      }
    }
  }
  // lexicographic tie-break: 1->4 via {1,2,4} and {1,3,4} picks the smaller
  Digraph g(4, {{1, 2}, {1, 3}, {2, 4}, {3, 4}, {4, 1}});
  CHECK(g.shortest_path(1, 4) == std::vector<int>{1, 2, 4});
}

TEST_CASE("cycle through an edge") {
  Digraph cyc3 = Digraph::cycle(3);
  CHECK(cyc3.cycle_through_edge(1, 2) == std::vector<int>{1, 2, 3, 1});
  CHECK(Digraph::complete(3).cycle_through_edge(1, 2) == std::vector<int>{1, 2, 1});
  CHECK(Digraph::cycle(4).cycle_through_edge(3, 4) == std::vector<int>{3, 4, 1, 2, 3});
  CHECK_THROWS_AS(cyc3.cycle_through_edge(2, 1), ConfigError);
}

TEST_CASE("cycle-through-edge length stays within the diameter bound, plus one when a reverse edge is missing") {
  for (int n : {3, 4}) {
    for (const Digraph& g : all_strongly_connected(n)) {
      const int d = g.diameter();
      for (auto [i, j] : g.edges()) {
        const auto cycle = g.cycle_through_edge(i, j);
        const int len = static_cast<int>(cycle.size()) - 1;
        REQUIRE(len <= d + 1);
        if (!g.has_edge(j, i)) REQUIRE(len >= 3);
      }
    }
  }
}

TEST_CASE("induced subgraphs") {
  auto [k3, map3] = Digraph::complete(4).induced_subgraph({1, 2, 3});
  CHECK(k3 == Digraph::complete(3));
  CHECK(map3 == std::vector<int>{1, 2, 3});

  auto [sub, map] = Digraph::cycle(3).induced_subgraph({1, 2});
  CHECK(sub.edges() == std::vector<std::pair<int, int>>{{1, 2}});

  auto [none, map2] = Digraph::cycle(4).induced_subgraph({1, 3});
  CHECK(none.edges().empty());
  CHECK_THROWS_AS(Digraph::cycle(3).induced_subgraph({}), ConfigError);
}

TEST_CASE("schedule lookup is right-continuous") {
  GraphSchedule s({{0.0, Digraph::cycle(3)}, {0.5, Digraph::complete(3)}}, 1.0);
  CHECK(s.graph_at(0.5) == Digraph::complete(3));
  CHECK(s.graph_at(0.49) == Digraph::cycle(3));
  CHECK(s.graph_at(0.0) == Digraph::cycle(3));
  CHECK(s.graph_at(1.0) == Digraph::complete(3));
  CHECK_THROWS_AS(s.graph_at(1.5), ConfigError);
  CHECK_THROWS_AS(s.graph_at(-0.1), ConfigError);

  GraphSchedule single = GraphSchedule::constant(Digraph::cycle(4), 2.0);
  CHECK(single.graph_at(1.7) == Digraph::cycle(4));
}

TEST_CASE("schedule invariants") {
  CHECK_THROWS_AS(GraphSchedule({{0.1, Digraph::cycle(3)}}, 1.0), ConfigError);
  CHECK_THROWS_AS(GraphSchedule({{0.0, Digraph::cycle(3)}, {0.0, Digraph::cycle(3)}}, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(GraphSchedule({{0.0, Digraph(3, {{1, 2}, {2, 3}})}}, 1.0), HypothesisError);
}

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(Digraph(3, {{1, 1}}), ConfigError);
  CHECK_THROWS_AS(Digraph(3, {{0, 2}}), ConfigError);
  CHECK_THROWS_AS(Digraph(3, {{1, 4}}), ConfigError);
}
