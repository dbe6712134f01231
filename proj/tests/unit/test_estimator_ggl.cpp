#include "laplearn/estimator.hpp"

#include "laplearn/kkt.hpp"
#include "laplearn/oracle.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace laplearn;
using laplearn::testing::model_statistic;
using laplearn::testing::random_mask;

namespace {

EstimatorConfig tight_config(LaplacianClass cls) {
  EstimatorConfig cfg;
  cfg.target_class = cls;
  cfg.epsilon = 1e-10;
  cfg.max_cycles = 5000;
  cfg.debug_checks = true;
  return cfg;
}

}  // namespace

TEST_CASE("estimate_ggl: empty mask decouples into the diagonal optimum") {
  Matrix s = Matrix::Zero(4, 4);
  s.diagonal() << 1.0, 2.0, 0.5, 3.0;
  const auto r = estimate_ggl(StatisticMatrix(s), ConnectivityMask::empty(4),
                              RegularizationMatrix::zero(4), tight_config(LaplacianClass::Generalized));
  CHECK(r.converged);
  Matrix expect = Matrix::Zero(4, 4);
  expect.diagonal() = s.diagonal().cwiseInverse();
  CHECK((r.theta.theta() - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("estimate_ggl: three-vertex example agrees with the oracle") {
  Matrix s(3, 3);
  s << 1, 0.3, 0.1, 0.3, 1, 0.3, 0.1, 0.3, 1;
  const StatisticMatrix stat(s);
  const auto mask = ConnectivityMask::full(3);
  const auto h = RegularizationMatrix::zero(3);
  const auto r = estimate_ggl(stat, mask, h, tight_config(LaplacianClass::Generalized));
  const auto o = oracle_solve(LaplacianClass::Generalized, stat, mask, h, 1e-10);
  CHECK(r.converged);
  CHECK(std::abs(r.objective - o.objective) <= 1e-6 * std::abs(o.objective));
}

TEST_CASE("estimate_ggl: nonpositive K diagonal is rejected with guidance") {
  Matrix s = Matrix::Zero(2, 2);  // zero statistic, alpha = 0
  CHECK_THROWS_AS(estimate_ggl(StatisticMatrix(s), ConnectivityMask::full(2),
                               RegularizationMatrix::zero(2), EstimatorConfig{}),
                  validation_error);
}

TEST_CASE("estimate_ggl: diagonally dominant target with a strongly active row sum") {
  // The unconstrained fit is [[1,-2],[-2,5]] with row sums (-1, 3); pinning
  // the first row sum moves the optimum to [[1/2,-1/2],[-1/2,3/2]].
  Matrix s(2, 2);
  s << 5, 2, 2, 1;
  const auto cfg = tight_config(LaplacianClass::DiagDominant);
  const auto r = estimate_ggl(StatisticMatrix(s), ConnectivityMask::full(2),
                              RegularizationMatrix::zero(2), cfg);
  Matrix expect(2, 2);
  expect << 0.5, -0.5, -0.5, 1.5;
  CHECK(r.converged);
  CHECK((r.theta.theta() - expect).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(r.audit.worst_update_increase <= 1e-10);
  CHECK(r.audit.worst_projection_increase <= 1e-10);
  const auto rep = kkt_report(r.theta, s, ConnectivityMask::full(2),
                              LaplacianClass::DiagDominant);
  CHECK(rep.worst() <= 1e-6);
}

TEST_CASE("estimate_ggl matches the oracle on random instances of both classes") {
  Rng rng(61, 0);
  for (LaplacianClass cls : {LaplacianClass::Generalized, LaplacianClass::DiagDominant}) {
    for (int rep = 0; rep < 12; ++rep) {
      const int n = 3 + static_cast<int>(rng.below(6));
      ConnectivityMask truth_mask;
      const auto stat = model_statistic(cls, n, 3 * n, rng, &truth_mask);
      const auto mask = rep % 2 == 0 ? ConnectivityMask::full(n)
                                     : random_mask(n, 0.6, rng, /*connect=*/false);
      const double alpha = rep % 3 == 0 ? 0.0 : 0.1;
      const auto h = RegularizationMatrix::l1(n, alpha);

      const auto cfg = tight_config(cls);
      const auto got = estimate_ggl(stat, mask, h, cfg);
      const auto want = oracle_solve(cls, stat, mask, h, 1e-10);

      CAPTURE(to_string(cls));
      CAPTURE(rep);
      CHECK(got.converged);
      CHECK(std::abs(got.objective - want.objective) <=
            1e-6 * std::max(1.0, std::abs(want.objective)));
      CHECK(got.audit.worst_update_increase <= 1e-10);
      CHECK(got.audit.worst_projection_increase <= 1e-10);
      const auto rep_kkt = kkt_report(got.theta, build_k(stat, h), mask, cls);
      CHECK(rep_kkt.worst() <= 1e-5);

      // Excluded edges are identically zero; the class validates.
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && mask(i, j) == 0) CHECK(got.theta.theta()(i, j) == 0.0);
      CHECK(validate_class(got.theta, tol::feasibility).satisfies(cls));

      // The tracked inverse stays consistent.
      CHECK((got.theta.theta() * got.c - Matrix::Identity(n, n)).norm() <= 1e-6 * n);
    }
  }
}

TEST_CASE("estimate_ggl: diagonally dominant never loosens the generalized optimum") {
  // When the generalized optimum is already diagonally dominant the two
  // targets coincide.
  Rng rng(67, 0);
  const int n = 5;
  const auto stat = model_statistic(LaplacianClass::DiagDominant, n, 100 * n, rng);
  const auto mask = ConnectivityMask::full(n);
  const auto h = RegularizationMatrix::zero(n);
  const auto ggl = estimate_ggl(stat, mask, h, tight_config(LaplacianClass::Generalized));
  const auto ddgl = estimate_ggl(stat, mask, h, tight_config(LaplacianClass::DiagDominant));
  if (validate_class(ggl.theta, 1e-12).satisfies(LaplacianClass::DiagDominant))
    CHECK((ggl.theta.theta() - ddgl.theta.theta()).norm() <= 1e-6 * ggl.theta.theta().norm());
}

TEST_CASE("estimate_ggl is deterministic") {
  Rng rng(71, 0);
  const auto stat = model_statistic(LaplacianClass::DiagDominant, 6, 30, rng);
  const auto mask = ConnectivityMask::full(6);
  const auto h = RegularizationMatrix::l1(6, 0.05);
  EstimatorConfig cfg;
  cfg.target_class = LaplacianClass::DiagDominant;
  const auto r1 = estimate_ggl(stat, mask, h, cfg);
  const auto r2 = estimate_ggl(stat, mask, h, cfg);
  CHECK(r1.theta.theta() == r2.theta.theta());
  CHECK(r1.cycles == r2.cycles);
}

TEST_CASE("randomized pivot order still reaches the optimum") {
  Rng rng(73, 0);
  const auto stat = model_statistic(LaplacianClass::DiagDominant, 5, 25, rng);
  const auto mask = ConnectivityMask::full(5);
  const auto h = RegularizationMatrix::zero(5);
  auto cfg = tight_config(LaplacianClass::Generalized);
  const double base = estimate_ggl(stat, mask, h, cfg).objective;
  cfg.randomized_order = true;
  cfg.order_seed = 99;
  CHECK(estimate_ggl(stat, mask, h, cfg).objective ==
        doctest::Approx(base).epsilon(1e-8));
}

TEST_CASE("ddgl_projection") {
  SUBCASE("already feasible input is untouched") {
    Matrix t(2, 2);
    t << 2, -1, -1, 2;
    Matrix c = t.inverse();
    const Matrix before = t;
    CHECK(ddgl_projection(t, c) == 0);
    CHECK(t == before);
  }
  SUBCASE("single negative row sum is clamped") {
    Matrix t(2, 2);
    t << 1, -1.5, -1.5, 3;
    Matrix c = t.inverse();
    CHECK(ddgl_projection(t, c) == 1);
    CHECK(t(0, 0) == doctest::Approx(1.5));
    CHECK(t(1, 1) == doctest::Approx(3.0));
    CHECK((c - t.inverse()).norm() < 1e-10);
  }
  SUBCASE("matches elementwise clamping on random draws") {
    Rng rng(79, 0);
    for (int rep = 0; rep < 10; ++rep) {
      GraphSpec spec;
      spec.topology = Topology::ErdosRenyi;
      spec.n = 6;
      spec.p = 0.7;
      spec.seed = rng.next_u64();
      Matrix t = generate_graph(spec).laplacian.theta();
      // Push some row sums negative by shrinking diagonals.
      for (int i = 0; i < 6; ++i)
        if (rng.bernoulli(0.5)) t(i, i) -= rng.uniform(0.0, 1.0) + t.row(i).sum();
      t = ((t + t.transpose()) * 0.5).eval();
      Eigen::SelfAdjointEigenSolver<Matrix> es(t, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() <= 1e-9) t.diagonal().array() += 1.0 - es.eigenvalues().minCoeff();

      const Vector nu_expect =
          (-t.rowwise().sum()).cwiseMax(0.0);  // separable clamp is the projection
      Matrix c = t.inverse();
      Matrix projected = t;
      ddgl_projection(projected, c);
      CHECK(((projected - t).diagonal() - nu_expect).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((projected - t - Matrix((projected - t).diagonal().asDiagonal())).norm() == 0.0);
    }
  }
}
