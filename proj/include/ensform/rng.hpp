#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

#include "ensform/digraph.hpp"

namespace ensform {

/// Seeded generator with explicitly coded distributions, so identical seeds
/// give identical streams on every platform (the standard library's
/// distribution objects do not promise that).
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;  // 53 mantissa bits
  }

  /// Box-Muller with a cached spare.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in [lo, hi] by rejection.
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / span * span;
    std::uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return lo + static_cast<int>(v % span);
  }

  bool bernoulli(double prob) { return uniform01() < prob; }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0;
};

/// Uniform over edge subsets with the given inclusion probability,
/// conditioned on strong connectivity by rejection.
inline Digraph random_strongly_connected(DeterministicRng& rng, int n, double edge_prob = 0.5) {
  for (;;) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        if (i != j && rng.bernoulli(edge_prob)) edges.push_back({i, j});
    Digraph g(n, std::move(edges));
    if (g.is_strongly_connected()) return g;
  }
}

inline Eigen::MatrixXd random_gaussian_config(DeterministicRng& rng, int n_agents, int dim) {
  Eigen::MatrixXd x(n_agents, dim);
  for (int i = 0; i < n_agents; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = rng.normal();
  return x;
}

}  // namespace ensform
