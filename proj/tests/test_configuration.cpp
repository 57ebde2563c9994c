#include <catch2/catch_amalgamated.hpp>

#include "ensform/configuration.hpp"
#include "ensform/rng.hpp"
#include "ensform/stochastic_lie.hpp"

using namespace ensform;

namespace {

Configuration unit_square() {
  Configuration x(4, 2);
  x << 0, 0, 1, 0, 0, 1, 1, 1;
  return x;
}

Configuration standard_simplex(int n) {
  Configuration x = Configuration::Zero(n + 1, n);
  for (int k = 0; k < n; ++k) x(k + 1, k) = 1.0;
  return x;
}

}  // namespace

TEST_CASE("nondegeneracy") {
  Configuration collinear(4, 2);
  collinear << 0, 0, 1, 1, 2, 2, 3, 3;
  CHECK_FALSE(is_nondegenerate(collinear));

  for (int n : {2, 3}) CHECK(is_nondegenerate(standard_simplex(n)));

  DeterministicRng rng(42);
  CHECK(is_nondegenerate(random_gaussian_config(rng, 5, 3)));

  // the reference-agent choice does not matter: permuting agents keeps the verdict
  Configuration x = unit_square();
  Configuration permuted(4, 2);
  permuted << x.row(2), x.row(0), x.row(3), x.row(1);
  CHECK(is_nondegenerate(x) == is_nondegenerate(permuted));
}

TEST_CASE("simplex subsets are greedy over indices") {
  CHECK(simplex_subset(unit_square()) == std::vector<int>{1, 2, 3});
  CHECK(simplex_subset(standard_simplex(2)) == std::vector<int>{1, 2, 3});
  CHECK(simplex_subset(standard_simplex(3)) == std::vector<int>{1, 2, 3, 4});

  Configuration collinear(4, 2);
  collinear << 0, 0, 1, 1, 2, 2, 3, 3;
  CHECK_THROWS_AS(simplex_subset(collinear), HypothesisError);
}

TEST_CASE("span of ideal images over a square") {
  SpanReport rep = span_rank(unit_square(), ideal_basis(4));
  CHECK(rep.rank == 8);
  CHECK(rep.singular_values.size() == 8);
  CHECK(std::is_sorted(rep.singular_values.rbegin(), rep.singular_values.rend()));
  CHECK(rep.basis_indices.size() == 8);
}

TEST_CASE("boundary agent count caps the span") {
  // with N = n+1 the ideal has dimension n(n+1)-1 < N*n
  DeterministicRng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    Configuration x = random_gaussian_config(rng, 3, 2);
    SpanReport rep = span_rank(x, ideal_basis(3));
    REQUIRE(rep.rank <= 5);
  }
}

TEST_CASE("consensus configurations are annihilated") {
  Configuration flat(4, 2);
  for (int i = 0; i < 4; ++i) {
    flat(i, 0) = 0.3;
    flat(i, 1) = -1.2;
  }
  SpanReport rep = span_rank(flat, ideal_basis(4));
  CHECK(rep.rank == 0);
}

TEST_CASE("constructive family over the square") {
  auto basis = constructive_basis(unit_square());
  REQUIRE(basis.size() == 8);
  for (const auto& [a, image] : basis) {
    CHECK(a.trace() == 0);
    CHECK(a.has_zero_row_sums());
  }
  // the last n images move only the left-out agent
  for (std::size_t k = 6; k < 8; ++k) {
    CHECK(basis[k].second.topRows(3).norm() == 0.0);
    CHECK(basis[k].second.row(3).norm() > 0.0);
  }
  Eigen::MatrixXd stacked(8, 8);
  for (int r = 0; r < 8; ++r) {
    Eigen::MatrixXd img = basis[r].second;
    stacked.row(r) = Eigen::Map<Eigen::VectorXd>(img.data(), img.size());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
  CHECK(svd.singularValues()(7) > 1e-10 * svd.singularValues()(0));
}

TEST_CASE("constructive family rejects boundary and degenerate inputs") {
  CHECK_THROWS_AS(constructive_basis(standard_simplex(2)), std::invalid_argument);
  Configuration collinear(5, 2);
  for (int i = 0; i < 5; ++i) {
    collinear(i, 0) = i;
    collinear(i, 1) = 2.0 * i;
  }
  CHECK_THROWS_AS(constructive_basis(collinear), HypothesisError);
}

TEST_CASE("random configurations have full span and constructive families") {
  const int trials = 25;
  for (int n : {2, 3}) {
    for (int agents = n + 2; agents <= 6; ++agents) {
      DeterministicRng rng(42);
      for (int trial = 0; trial < trials; ++trial) {
        Configuration x = random_gaussian_config(rng, agents, n);
        REQUIRE(span_rank(x, ideal_basis(agents)).rank == agents * n);
        REQUIRE(constructive_basis(x).size() == static_cast<std::size_t>(agents * n));
      }
    }
  }
}

TEST_CASE("full-algebra images fill the configuration space whenever N > n") {
  // generator images of the complete graph span; checked against the
  // numeric-rank oracle on random configurations
  DeterministicRng rng(7);
  for (int n : {2, 3}) {
    for (int agents = n + 1; agents <= 5; ++agents) {
      std::vector<IntMatrix> full;
      for (const auto& m : s_g(Digraph::complete(agents))) full.push_back(m);
      for (int trial = 0; trial < 10; ++trial) {
        Configuration x = random_gaussian_config(rng, agents, n);
        REQUIRE(span_rank(x, full).rank == agents * n);
      }
    }
  }
}
