#include "laplearn/evaluation.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace laplearn;

TEST_CASE("relative_error") {
  Matrix t(2, 2);
  t << 1, -1, -1, 1;
  CHECK(relative_error(t, t) == 0.0);
  CHECK(relative_error(2 * t, t) == doctest::Approx(1.0));
  CHECK(relative_error(Matrix::Zero(2, 2), t) == doctest::Approx(1.0));
  CHECK_THROWS_AS(relative_error(t, Matrix::Zero(2, 2)), validation_error);
}

TEST_CASE("f_score") {
  Matrix truth(4, 4);
  truth.setZero();
  truth(0, 1) = truth(1, 0) = -1;
  truth(1, 2) = truth(2, 1) = -0.5;
  truth(2, 3) = truth(3, 2) = -2;

  SUBCASE("identical support is perfect") { CHECK(f_score(truth, truth) == 1.0); }
  SUBCASE("tp=2 fp=1 fn=1 gives 2/3") {
    Matrix est = truth;
    est(2, 3) = est(3, 2) = 0.0;   // lose one edge (fn)
    est(0, 3) = est(3, 0) = -0.2;  // invent one (fp)
    CHECK(f_score(est, truth) == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("empty estimate against e edges is zero") {
    CHECK(f_score(Matrix::Zero(4, 4), truth) == 0.0);
  }
  SUBCASE("both empty counts as perfect") {
    CHECK(f_score(Matrix::Zero(4, 4), Matrix::Zero(4, 4)) == 1.0);
  }
  SUBCASE("invariant under positive rescaling") {
    Matrix est = truth;
    est(0, 3) = est(3, 0) = -0.2;
    const double base = f_score(est, truth);
    for (double c : {0.001, 0.5, 3.0, 1000.0}) CHECK(f_score(c * est, truth) == base);
  }
}

TEST_CASE("alpha_grid") {
  SUBCASE("fifteen ascending values for a nonzero statistic") {
    Matrix s = Matrix::Identity(64, 64);
    s(0, 1) = s(1, 0) = 1.0;
    const auto grid = alpha_grid(StatisticMatrix(s), 1920);
    REQUIRE(grid.size() == 15);
    CHECK(grid.front() == 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
    // Largest point: 0.75 · s_max √(ln 64 / 1920).
    CHECK(grid.back() == doctest::Approx(0.034906).epsilon(1e-4));
    // Next-largest is 0.75 times that.
    CHECK(grid[13] == doctest::Approx(0.75 * grid[14]).epsilon(1e-12));
  }
  SUBCASE("degenerate statistic collapses to {0}") {
    const auto grid = alpha_grid(StatisticMatrix(Matrix::Identity(8, 8)), 100);
    REQUIRE(grid.size() == 1);
    CHECK(grid[0] == 0.0);
  }
}

TEST_CASE("run_benchmark: protocol smoke test with paired methods") {
  BenchmarkConfig cfg;
  cfg.graph.topology = Topology::Grid;
  cfg.graph.n = 16;
  cfg.graph.seed = 0;
  cfg.k_over_n = {30};
  cfg.trials = 3;
  cfg.seed = 77;
  cfg.methods = {{LaplacianClass::Generalized, MaskMode::TrueMask},
                 {LaplacianClass::Generalized, MaskMode::FullMask}};

  const auto report = run_benchmark(cfg);
  REQUIRE(report.records.size() == 6);
  for (const auto& rec : report.records) {
    REQUIRE(rec.ok());
    CHECK(rec.k == 480);
    CHECK(rec.re > 0.0);
    CHECK(rec.re < 1.0);
    CHECK(rec.fs > 0.0);
    CHECK(rec.converged);
  }
  const auto* masked = report.find("ggl-mask", 30);
  const auto* full = report.find("ggl-full", 30);
  REQUIRE(masked != nullptr);
  REQUIRE(full != nullptr);
  CHECK(masked->trials_ok == 3);
  CHECK(masked->re_mean < full->re_mean);  // paired comparison at k/n = 30

  SUBCASE("deterministic given (config, seed)") {
    const auto again = run_benchmark(cfg);
    CHECK(trials_to_csv(again, false) == trials_to_csv(report, false));
    CHECK(report_to_json(again, false) == report_to_json(report, false));
    CHECK(curve_to_csv(again) == curve_to_csv(report));
  }
  SUBCASE("parallel execution matches serial") {
    auto par = cfg;
    par.jobs = 4;
    CHECK(trials_to_csv(run_benchmark(par), false) == trials_to_csv(report, false));
  }
}

TEST_CASE("run_benchmark: best alpha never loses to alpha = 0") {
  BenchmarkConfig cfg;
  cfg.graph.topology = Topology::Grid;
  cfg.graph.n = 16;
  cfg.k_over_n = {2};
  cfg.trials = 2;
  cfg.seed = 5;
  cfg.methods = {{LaplacianClass::Generalized, MaskMode::TrueMask}};
  auto alpha0 = cfg;
  alpha0.methods[0].sweep_alpha = false;

  const auto swept = run_benchmark(cfg);
  const auto fixed = run_benchmark(alpha0);
  for (std::size_t i = 0; i < swept.records.size(); ++i)
    CHECK(swept.records[i].re <= fixed.records[i].re + 1e-12);
}

TEST_CASE("run_benchmark validates its inputs") {
  BenchmarkConfig cfg;
  cfg.graph.n = 16;
  cfg.methods = {{LaplacianClass::Generalized, MaskMode::TrueMask}};
  cfg.trials = 0;
  CHECK_THROWS_AS(run_benchmark(cfg), validation_error);
  cfg.trials = 1;
  cfg.methods.clear();
  CHECK_THROWS_AS(run_benchmark(cfg), validation_error);
}
