#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "ensform/errors.hpp"

namespace ensform {

/// Directed graph on vertices 1..N without self-loops. Edges are stored as a
/// sorted unique list of ordered pairs.
class Digraph {
 public:
  Digraph() = default;

  Digraph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
    if (n < 1) throw ConfigError("digraph: vertex count must be positive");
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (auto [i, j] : edges) {
      if (i < 1 || i > n || j < 1 || j > n)
        throw ConfigError("digraph: edge endpoint out of range");
      if (i == j) throw ConfigError("digraph: self-loops are not allowed");
    }
    edges_ = std::move(edges);
    out_.assign(n + 1, {});
    for (auto [i, j] : edges_) out_[i].push_back(j);  // sorted because edges_ is
  }

  static Digraph cycle(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i <= n; ++i) e.push_back({i, i % n + 1});
    return Digraph(n, std::move(e));
  }

  static Digraph complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        if (i != j) e.push_back({i, j});
    return Digraph(n, std::move(e));
  }

  int n_vertices() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  bool has_edge(int i, int j) const {
    check_vertex(i);
    check_vertex(j);
    return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(i, j));
  }

  const std::vector<int>& out_neighbors(int i) const {
    check_vertex(i);
    return out_[i];
  }

  /// Strong connectivity via Tarjan's SCC algorithm (iterative).
  bool is_strongly_connected() const {
    if (n_ == 1) return true;
    std::vector<int> index(n_ + 1, -1), low(n_ + 1, 0), on_stack(n_ + 1, 0);
    std::vector<int> stack;
    int counter = 0, scc_count = 0;
    struct Frame {
      int v;
      std::size_t next;
    };
    for (int root = 1; root <= n_; ++root) {
      if (index[root] != -1) continue;
      std::vector<Frame> frames{{root, 0}};
      index[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack[root] = 1;
      while (!frames.empty()) {
        Frame& f = frames.back();
        if (f.next < out_[f.v].size()) {
          int w = out_[f.v][f.next++];
          if (index[w] == -1) {
            index[w] = low[w] = counter++;
            stack.push_back(w);
            on_stack[w] = 1;
            frames.push_back({w, 0});
          } else if (on_stack[w]) {
            low[f.v] = std::min(low[f.v], index[w]);
          }
        } else {
          if (low[f.v] == index[f.v]) {
            ++scc_count;
            if (scc_count > 1) return false;
            int w;
            do {
              w = stack.back();
              stack.pop_back();
              on_stack[w] = 0;
            } while (w != f.v);
          }
          int v = f.v;
          frames.pop_back();
          if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        }
      }
    }
    return scc_count == 1;
  }

  /// Distance (edge count) of a shortest directed path from each vertex to
  /// target, by BFS on the reversed graph. unreachable => -1.
  std::vector<int> distances_to(int target) const {
    check_vertex(target);
    std::vector<std::vector<int>> in(n_ + 1);
    for (auto [i, j] : edges_) in[j].push_back(i);
    std::vector<int> dist(n_ + 1, -1);
    std::queue<int> q;
    dist[target] = 0;
    q.push(target);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int u : in[v])
        if (dist[u] == -1) {
          dist[u] = dist[v] + 1;
          q.push(u);
        }
    }
    return dist;
  }

  /// Diameter in the sense used here: the smallest L such that every ordered
  /// vertex pair (i, j) -- including i = j, where the path is a cycle through
  /// i -- is joined by a directed path of length at most L. For a cycle
  /// digraph on n vertices this gives n, not the usual n-1.
  int diameter() const {
    require_strongly_connected("diameter");
    if (n_ == 1)
      throw HypothesisError("diameter: undefined for a single vertex (no cycle exists)");
    int d = 0;
    for (int j = 1; j <= n_; ++j) {
      std::vector<int> dist = distances_to(j);
      for (int i = 1; i <= n_; ++i) {
        if (i != j) {
          d = std::max(d, dist[i]);
        } else {
          int cyc = std::numeric_limits<int>::max();
          for (int k : out_[i]) cyc = std::min(cyc, 1 + dist[k]);
          d = std::max(d, cyc);
        }
      }
    }
    return d;
  }

  /// Minimum-length directed path from i to j; for i == j, a minimum-length
  /// cycle through i (list starts and ends with i). Ties are broken toward
  /// the lexicographically smallest vertex sequence.
  std::vector<int> shortest_path(int i, int j) const {
    require_strongly_connected("shortest_path");
    check_vertex(i);
    check_vertex(j);
    std::vector<int> dist = distances_to(j);
    if (i != j) return greedy_path(i, j, dist);
    if (out_[i].empty()) throw HypothesisError("shortest_path: no cycle through vertex");
    int best = std::numeric_limits<int>::max(), start = -1;
    for (int k : out_[i]) {  // out_ sorted: first minimiser is lexicographically smallest
      if (1 + dist[k] < best) {
        best = 1 + dist[k];
        start = k;
      }
    }
    std::vector<int> path{i};
    std::vector<int> rest = greedy_path(start, j, dist);
    path.insert(path.end(), rest.begin(), rest.end());
    return path;
  }

  /// Minimum-length cycle whose first edge is (j, k).
  std::vector<int> cycle_through_edge(int j, int k) const {
    if (!has_edge(j, k)) throw ConfigError("cycle_through_edge: edge not present");
    require_strongly_connected("cycle_through_edge");
    std::vector<int> dist = distances_to(j);
    std::vector<int> cycle{j};
    std::vector<int> back = greedy_path(k, j, dist);
    cycle.insert(cycle.end(), back.begin(), back.end());
    return cycle;
  }

  /// Subgraph induced by the given vertex subset, reindexed 1..|V'|.
  /// Returns the graph together with the map new index -> old index.
  std::pair<Digraph, std::vector<int>> induced_subgraph(const std::vector<int>& subset) const {
    if (subset.empty()) throw ConfigError("induced_subgraph: empty vertex subset");
    std::set<int> verts(subset.begin(), subset.end());
    for (int v : verts) check_vertex(v);
    std::vector<int> new_to_old(verts.begin(), verts.end());
    std::vector<int> old_to_new(n_ + 1, 0);
    for (std::size_t k = 0; k < new_to_old.size(); ++k) old_to_new[new_to_old[k]] = static_cast<int>(k) + 1;
    std::vector<std::pair<int, int>> e;
    for (auto [a, b] : edges_)
      if (old_to_new[a] && old_to_new[b]) e.push_back({old_to_new[a], old_to_new[b]});
    return {Digraph(static_cast<int>(new_to_old.size()), std::move(e)), new_to_old};
  }

  friend bool operator==(const Digraph& a, const Digraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  void check_vertex(int v) const {
    if (v < 1 || v > n_) throw std::out_of_range("digraph: vertex index out of range");
  }

  void require_strongly_connected(const char* op) const {
    if (!is_strongly_connected())
      throw HypothesisError(std::string(op) + ": digraph is not strongly connected");
  }

  // Walks from u toward j along a shortest route, always taking the smallest
  // admissible out-neighbor. dist must be distances_to(j).
  std::vector<int> greedy_path(int u, int j, const std::vector<int>& dist) const {
    std::vector<int> path{u};
    int cur = u;
    while (cur != j) {
      for (int k : out_[cur]) {
        if (dist[k] == dist[cur] - 1) {
          cur = k;
          break;
        }
      }
      path.push_back(cur);
    }
    return path;
  }

  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> out_;
};

/// Right-continuous piecewise-constant graph-valued signal on [0, T].
class GraphSchedule {
 public:
  GraphSchedule(std::vector<std::pair<double, Digraph>> segments, double horizon)
      : segments_(std::move(segments)), horizon_(horizon) {
    if (segments_.empty()) throw ConfigError("schedule: needs at least one segment");
    if (!(horizon_ > 0)) throw ConfigError("schedule: horizon must be positive");
    if (segments_.front().first != 0.0)
      throw ConfigError("schedule: first switch time must be 0");
    for (std::size_t k = 0; k + 1 < segments_.size(); ++k)
      if (!(segments_[k].first < segments_[k + 1].first))
        throw ConfigError("schedule: switch times must be strictly increasing");
    if (segments_.back().first >= horizon_)
      throw ConfigError("schedule: switch times must lie inside [0, T)");
    for (const auto& [t, g] : segments_)
      if (!g.is_strongly_connected())
        throw HypothesisError("schedule: every segment graph must be strongly connected");
  }

  static GraphSchedule constant(Digraph g, double horizon) {
    std::vector<std::pair<double, Digraph>> seg;
    seg.emplace_back(0.0, std::move(g));
    return GraphSchedule(std::move(seg), horizon);
  }

  double horizon() const { return horizon_; }
  const std::vector<std::pair<double, Digraph>>& segments() const { return segments_; }

  std::size_t segment_index_at(double t) const {
    if (t < 0.0 || t > horizon_ * (1 + 1e-12) + 1e-15)
      throw ConfigError("schedule: time outside [0, T]");
    std::size_t k = segments_.size() - 1;
    while (k > 0 && segments_[k].first > t) --k;
    return k;
  }

  /// Right-continuous lookup: the graph of the last segment with switch
  /// time <= t.
  const Digraph& graph_at(double t) const { return segments_[segment_index_at(t)].second; }

  /// End time of segment k (switch time of the next segment, or T).
  double segment_end(std::size_t k) const {
    return k + 1 < segments_.size() ? segments_[k + 1].first : horizon_;
  }

 private:
  std::vector<std::pair<double, Digraph>> segments_;
  double horizon_;
};

}  // namespace ensform
