#pragma once

#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ensform/digraph.hpp"
#include "ensform/int_matrix.hpp"
#include "ensform/stochastic_lie_basics.hpp"

namespace ensform {

/// Formal Lie product over edge generators: a binary tree whose leaves are
/// edges (i, j), standing for the generator attached to that edge, and whose
/// internal nodes are brackets. Depth is the number of brackets, i.e. the
/// number of leaves minus one.
///
/// The constructive lemmas only ever produce right combs -- words of the
/// shape [a1, [a2, ... [ak, a(k+1)]]] with every left factor a single edge --
/// which is exactly what membership in the iterated-commutator sets at a
/// given depth requires.
class BracketWord {
 public:
  using Edge = std::pair<int, int>;

  static BracketWord single(Edge e) {
    BracketWord w;
    w.root_ = w.add_leaf(e);
    return w;
  }

  static BracketWord bracket(const BracketWord& left, const BracketWord& right) {
    BracketWord w;
    int l = w.graft(left, left.root_);
    int r = w.graft(right, right.root_);
    w.root_ = w.add_node(l, r);
    return w;
  }

  int depth() const { return count_internal(root_); }
  std::size_t leaf_count() const { return count_leaves(root_); }

  /// Exact evaluation as an N x N integer matrix.
  IntMatrix evaluate(int n) const { return eval_node(root_, n); }

  /// Word with negated evaluation. Swapping the two leaves of the innermost
  /// bracket of a right comb flips the sign and keeps the word a right comb;
  /// every construction here stays in that class.
  BracketWord negated() const {
    BracketWord w = *this;
    int node = w.root_;
    if (w.nodes_[node].is_leaf())
      throw std::invalid_argument("bracket word: cannot negate a bare generator");
    while (!w.nodes_[w.nodes_[node].right].is_leaf()) node = w.nodes_[node].right;
    Node& inner = w.nodes_[node];
    if (!w.nodes_[inner.left].is_leaf())
      throw std::invalid_argument("bracket word: negation requires a right comb");
    std::swap(inner.left, inner.right);
    return w;
  }

  bool is_right_comb() const {
    int node = root_;
    while (!nodes_[node].is_leaf()) {
      if (!nodes_[nodes_[node].left].is_leaf()) return false;
      node = nodes_[node].right;
    }
    return true;
  }

  /// Leaves in left-to-right order.
  std::vector<Edge> leaves() const {
    std::vector<Edge> out;
    collect_leaves(root_, out);
    return out;
  }

  std::string to_string() const { return print_node(root_); }

 private:
  struct Node {
    int left = -1, right = -1;
    Edge edge{0, 0};
    bool is_leaf() const { return left < 0; }
  };

  int add_leaf(Edge e) {
    nodes_.push_back(Node{-1, -1, e});
    return static_cast<int>(nodes_.size()) - 1;
  }

  int add_node(int l, int r) {
    nodes_.push_back(Node{l, r, {0, 0}});
    return static_cast<int>(nodes_.size()) - 1;
  }

  int graft(const BracketWord& other, int node) {
    const Node& src = other.nodes_[node];
    if (src.is_leaf()) return add_leaf(src.edge);
    int l = graft(other, src.left);
    int r = graft(other, src.right);
    return add_node(l, r);
  }

  int count_internal(int node) const {
    const Node& nd = nodes_[node];
    if (nd.is_leaf()) return 0;
    return 1 + count_internal(nd.left) + count_internal(nd.right);
  }

  std::size_t count_leaves(int node) const {
    const Node& nd = nodes_[node];
    if (nd.is_leaf()) return 1;
    return count_leaves(nd.left) + count_leaves(nd.right);
  }

  IntMatrix eval_node(int node, int n) const {
    const Node& nd = nodes_[node];
    if (nd.is_leaf()) return primary_matrix(n, nd.edge.first, nd.edge.second);
    return commutator(eval_node(nd.left, n), eval_node(nd.right, n));
  }

  void collect_leaves(int node, std::vector<Edge>& out) const {
    const Node& nd = nodes_[node];
    if (nd.is_leaf()) {
      out.push_back(nd.edge);
      return;
    }
    collect_leaves(nd.left, out);
    collect_leaves(nd.right, out);
  }

  std::string print_node(int node) const {
    const Node& nd = nodes_[node];
    if (nd.is_leaf()) {
      std::ostringstream os;
      os << "A" << nd.edge.first << "," << nd.edge.second;
      return os.str();
    }
    return "[" + print_node(nd.left) + "," + print_node(nd.right) + "]";
  }

  std::vector<Node> nodes_;
  int root_ = -1;
};

namespace detail {

inline void check_path_shape(const Digraph& g, const std::vector<int>& path, bool cycle) {
  if (path.size() < 3)
    throw std::invalid_argument("bracket word: path/cycle must have length >= 2");
  for (std::size_t p = 0; p + 1 < path.size(); ++p)
    if (!g.has_edge(path[p], path[p + 1]))
      throw std::invalid_argument("bracket word: consecutive vertices must be edges");
  if (cycle && path.front() != path.back())
    throw std::invalid_argument("bracket word: cycle must return to its start");
  if (!cycle && path.front() == path.back())
    throw std::invalid_argument("bracket word: path endpoints must be distinct");
  std::vector<int> verts(path.begin(), cycle ? path.end() - 1 : path.end());
  std::sort(verts.begin(), verts.end());
  if (std::adjacent_find(verts.begin(), verts.end()) != verts.end())
    throw std::invalid_argument("bracket word: vertices along a path must be distinct");
}

}  // namespace detail

/// Word of depth l-1 for a path [i0, ..., il], l >= 2, whose evaluation is
/// the difference of the generators for (i0, il) and (i0, i(l-1)). Built by
/// the inductive wrap: each extra path edge left-multiplies the negation of
/// the previous word.
inline BracketWord bracket_word_for_path(const Digraph& g, const std::vector<int>& path) {
  detail::check_path_shape(g, path, /*cycle=*/false);
  BracketWord w = BracketWord::bracket(BracketWord::single({path[0], path[1]}),
                                       BracketWord::single({path[1], path[2]}));
  for (std::size_t p = 3; p < path.size(); ++p)
    w = BracketWord::bracket(BracketWord::single({path[p - 1], path[p]}), w.negated());
  return w;
}

/// Word of depth l+1 for a cycle [i0, i1, ..., il, i0], l >= 2, whose
/// evaluation is the difference of the generators for (i0, i1) and (i1, i0):
/// the path word for [i2, ..., il, i0, i1] wrapped twice.
inline BracketWord bracket_word_for_cycle(const Digraph& g, const std::vector<int>& cycle) {
  detail::check_path_shape(g, cycle, /*cycle=*/true);
  if (cycle.size() < 4)
    throw std::invalid_argument("bracket word: cycle must have length >= 3 (2-cycles are direct)");
  std::vector<int> path(cycle.begin() + 2, cycle.end());  // [i2, ..., il, i0]
  path.push_back(cycle[1]);                               // ... i1
  BracketWord w = bracket_word_for_path(g, path);
  w = BracketWord::bracket(BracketWord::single({cycle[1], cycle[2]}), w);
  w = BracketWord::bracket(BracketWord::single({cycle[0], cycle[1]}), w);
  return w;
}

}  // namespace ensform
