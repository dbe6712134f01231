#include "laplearn/oracle.hpp"

#include "laplearn/estimator.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace laplearn;

TEST_CASE("oracle: decoupled diagonal optimum with no allowed edges") {
  Matrix s(3, 3);
  s.setZero();
  s.diagonal() << 2.0, 0.5, 4.0;
  const auto r = oracle_solve(LaplacianClass::Generalized, StatisticMatrix(s),
                              ConnectivityMask::empty(3), RegularizationMatrix::zero(3), 1e-10);
  CHECK(r.converged);
  Matrix expect = Matrix::Zero(3, 3);
  expect.diagonal() << 0.5, 2.0, 0.25;
  CHECK((r.theta - expect).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("oracle: interior generalized optimum is the inverse statistic") {
  Matrix s(2, 2);
  s << 5, 2, 2, 1;
  const auto r = oracle_solve(LaplacianClass::Generalized, StatisticMatrix(s),
                              ConnectivityMask::full(2), RegularizationMatrix::zero(2), 1e-11);
  Matrix expect(2, 2);
  expect << 1, -2, -2, 5;  // S⁻¹, already sign feasible
  CHECK(r.converged);
  CHECK((r.theta - expect).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("oracle: diagonally dominant optimum with an active row-sum constraint") {
  // For S = [[5,2],[2,1]] the first-order conditions with the first row sum
  // pinned at zero give Θ* = [[1/2, −1/2],[−1/2, 3/2]] (worked by hand from
  // the multiplier system).
  Matrix s(2, 2);
  s << 5, 2, 2, 1;
  const auto r = oracle_solve(LaplacianClass::DiagDominant, StatisticMatrix(s),
                              ConnectivityMask::full(2), RegularizationMatrix::zero(2), 1e-11);
  Matrix expect(2, 2);
  expect << 0.5, -0.5, -0.5, 1.5;
  CHECK(r.converged);
  CHECK((r.theta - expect).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(r.objective == doctest::Approx(2.0 - std::log(0.5)).epsilon(1e-9));
}

TEST_CASE("oracle: two-vertex combinatorial closed form") {
  Rng rng(51, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix x = laplearn::testing::random_spd(2, rng, 0.3);
    const StatisticMatrix s(x);
    const double w = 1.0 / (x(0, 0) + x(1, 1) - 2 * x(0, 1));
    REQUIRE(w > 0);
    const auto r = oracle_solve(LaplacianClass::Combinatorial, s, ConnectivityMask::full(2),
                                RegularizationMatrix::zero(2), 1e-11);
    CHECK(r.converged);
    CHECK(r.theta(0, 1) == doctest::Approx(-w).epsilon(1e-6));
    CHECK(r.theta(0, 0) == doctest::Approx(w).epsilon(1e-6));
    CHECK((r.theta.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("oracle refuses large instances") {
  const auto s = StatisticMatrix(Matrix::Identity(11, 11));
  CHECK_THROWS_AS(oracle_solve(LaplacianClass::Generalized, s, ConnectivityMask::full(11),
                               RegularizationMatrix::zero(11)),
                  validation_error);
}

TEST_CASE("oracle is deterministic") {
  Rng rng(53, 0);
  const auto s = laplearn::testing::model_statistic(LaplacianClass::DiagDominant, 5, 40, rng);
  const auto a = ConnectivityMask::full(5);
  const auto h = RegularizationMatrix::l1(5, 0.05);
  const auto r1 = oracle_solve(LaplacianClass::DiagDominant, s, a, h, 1e-9);
  const auto r2 = oracle_solve(LaplacianClass::DiagDominant, s, a, h, 1e-9);
  CHECK(r1.theta == r2.theta);
  CHECK(r1.objective == r2.objective);
}
