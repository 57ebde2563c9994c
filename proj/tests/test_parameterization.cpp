#include <catch2/catch_amalgamated.hpp>

#include "ensform/parameterization.hpp"

using namespace ensform;

namespace {

Sigma sigma1(double v) {
  Sigma s(1);
  s(0) = v;
  return s;
}

ParameterizationSet const_and_identity() {
  return ParameterizationSet(
      {RhoFunction::constant(1.0), RhoFunction::polynomial(0, {0.0, 1.0})}, 0);
}

}  // namespace

TEST_CASE("separation witnesses") {
  SigmaGrid grid = SigmaGrid::uniform_1d(0.0, 1.0, 5);
  auto rep = check_separation(const_and_identity(), grid);
  CHECK(rep.separated);
  for (const auto& pw : rep.pairs) CHECK(pw.witness == 1);

  ParameterizationSet constants({RhoFunction::constant(1.0)}, 0);
  CHECK_FALSE(check_separation(constants, grid).separated);

  // an even function cannot separate symmetric samples
  SigmaGrid pm;
  pm.samples = {sigma1(-1.0), sigma1(1.0)};
  ParameterizationSet even(
      {RhoFunction::polynomial(0, {0.0, 0.0, 1.0}), RhoFunction::constant(1.0)}, 1);
  CHECK_FALSE(check_separation(even, pm).separated);
}

TEST_CASE("monomial evaluation") {
  ParameterizationSet p = const_and_identity();
  CHECK(eval_monomial({0, 0}, p, sigma1(3.7)) == 1.0);
  CHECK(eval_monomial({0, 3}, p, sigma1(2.0)) == 8.0);
  CHECK(eval_monomial({-2, 0}, p, sigma1(2.0)) == 1.0);  // constant-one inverse

  // negative exponent on a function not designated nonzero is rejected
  ParameterizationSet q(
      {RhoFunction::polynomial(0, {0.0, 1.0}), RhoFunction::constant(1.0)}, 1);
  CHECK_THROWS_AS(eval_monomial({-2, 0}, q, sigma1(2.0)), std::invalid_argument);
}

TEST_CASE("monomial enumeration is graded and complete") {
  auto monos = monomials_up_to_degree(2, 3);
  CHECK(monos.size() == 10);  // (k+1)(k+2)/2 for two functions
  CHECK(monos.front() == std::vector<int>{0, 0});
  for (std::size_t k = 0; k + 1 < monos.size(); ++k)
    CHECK(monomial_degree(monos[k]) <= monomial_degree(monos[k + 1]));
  auto single = monomials_up_to_degree(1, 4);
  CHECK(single.size() == 5);
}

TEST_CASE("nonzero designation is validated on grids") {
  SigmaGrid grid = SigmaGrid::uniform_1d(-1.0, 1.0, 5);  // contains 0
  ParameterizationSet p(
      {RhoFunction::polynomial(0, {0.0, 1.0}), RhoFunction::constant(1.0)}, 0);
  CHECK_THROWS_AS(p.require_nonzero_on(grid), HypothesisError);
  ParameterizationSet ok(
      {RhoFunction::constant(2.0), RhoFunction::polynomial(0, {0.0, 1.0})}, 0);
  CHECK_NOTHROW(ok.require_nonzero_on(grid));
}

TEST_CASE("rho function kinds evaluate") {
  Sigma s(2);
  s << 0.5, -2.0;
  Eigen::VectorXd slope(2);
  slope << 2.0, 1.0;
  CHECK(RhoFunction::constant(3.0)(s) == 3.0);
  CHECK(RhoFunction::affine(1.0, slope)(s) == Catch::Approx(1.0 + 1.0 - 2.0));
  CHECK(RhoFunction::polynomial(1, {1.0, 0.0, 1.0})(s) == Catch::Approx(5.0));
  CHECK(RhoFunction::exponential(0.0, slope)(s) == Catch::Approx(std::exp(-1.0)));
}

TEST_CASE("grids") {
  SigmaGrid g = SigmaGrid::uniform_1d(0.0, 1.0, 9);
  CHECK(g.size() == 9);
  CHECK(g.samples.front()(0) == 0.0);
  CHECK(g.samples.back()(0) == 1.0);
  SigmaGrid box = SigmaGrid::box_2d(0, 1, 3, -1, 1, 2);
  CHECK(box.size() == 6);
  CHECK(box.samples.front().size() == 2);
  CHECK_THROWS_AS(SigmaGrid::uniform_1d(0, 1, 0), ConfigError);
}
