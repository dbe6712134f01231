#include "laplearn/nnqp.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace laplearn;
using laplearn::testing::random_spd;

namespace {

// Independent oracle: enumerate every active set, solve the equality system,
// and return the unique KKT-consistent point.
Vector enumerate_nnqp(const Matrix& q, const Vector& p) {
  const int m = static_cast<int>(q.rows());
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> free_idx;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) free_idx.push_back(i);
    Vector x = Vector::Zero(m);
    if (!free_idx.empty()) {
      const int f = static_cast<int>(free_idx.size());
      Matrix qff(f, f);
      Vector pf(f);
      for (int a = 0; a < f; ++a) {
        pf(a) = p(free_idx[a]);
        for (int b = 0; b < f; ++b) qff(a, b) = q(free_idx[a], free_idx[b]);
      }
      const Vector xf = qff.llt().solve(pf);
      for (int a = 0; a < f; ++a) x(free_idx[a]) = xf(a);
    }
    const Vector y = q * x - p;
    bool ok = true;
    for (int i = 0; i < m; ++i) {
      const bool is_free = mask & (1u << i);
      if (is_free && x(i) < -1e-11) ok = false;
      if (!is_free && y(i) < -1e-11) ok = false;
    }
    if (ok) return x;
  }
  throw std::logic_error("enumeration found no KKT point");
}

double qp_objective(const Matrix& q, const Vector& p, const Vector& x) {
  return 0.5 * x.dot(q * x) - x.dot(p);
}

}  // namespace

TEST_CASE("nnqp: unconstrained optimum already nonnegative") {
  NnqpProblem prob;
  prob.q = Matrix::Identity(3, 3);
  prob.p = Vector(3);
  prob.p << 1, 2, 3;
  const Vector x = solve_nnqp(prob);
  CHECK((x - prob.p).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("nnqp: all gradients nonnegative at the origin") {
  NnqpProblem prob;
  prob.q = Matrix::Identity(2, 2);
  prob.p = Vector(2);
  prob.p << -1, -2;
  CHECK(solve_nnqp(prob).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("nnqp matches the active-set enumeration oracle") {
  Rng rng(31, 0);
  for (int rep = 0; rep < 60; ++rep) {
    NnqpProblem prob;
    prob.q = random_spd(5, rng, 0.2);
    prob.p = Vector(5);
    for (int i = 0; i < 5; ++i) prob.p(i) = rng.normal();
    const Vector got = solve_nnqp(prob, 1e-12);
    const Vector want = enumerate_nnqp(prob.q, prob.p);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(qp_objective(prob.q, prob.p, got) <=
          qp_objective(prob.q, prob.p, want) + 1e-9);
  }
}

TEST_CASE("nnqp KKT properties on random instances") {
  Rng rng(37, 0);
  for (int rep = 0; rep < 40; ++rep) {
    const int m = 2 + static_cast<int>(rng.below(9));
    NnqpProblem prob;
    prob.q = random_spd(m, rng, 0.3);
    prob.p = Vector(m);
    for (int i = 0; i < m; ++i) prob.p(i) = 2.0 * rng.normal();
    const double tol = 1e-10;
    const Vector x = solve_nnqp(prob, tol);
    const Vector y = prob.q * x - prob.p;
    const double y_scale = std::max(1.0, prob.p.cwiseAbs().maxCoeff());
    CHECK(x.minCoeff() >= 0.0);
    CHECK(y.minCoeff() >= -tol * y_scale * 2);
    CHECK((x.array() * y.array()).abs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("nnqp warm start reaches the same solution") {
  Rng rng(41, 0);
  for (int rep = 0; rep < 20; ++rep) {
    NnqpProblem prob;
    prob.q = random_spd(6, rng, 0.2);
    prob.p = Vector(6);
    for (int i = 0; i < 6; ++i) prob.p(i) = rng.normal();
    const Vector cold = solve_nnqp(prob);
    for (int trial = 0; trial < 4; ++trial) {
      prob.active_set_hint.clear();
      for (int i = 0; i < 6; ++i)
        if (rng.bernoulli(0.5)) prob.active_set_hint.push_back(i);
      CHECK((solve_nnqp(prob) - cold).cwiseAbs().maxCoeff() < 1e-9);
    }
    prob.active_set_hint.clear();
  }
}

TEST_CASE("nnqp is scale equivariant") {
  Rng rng(43, 0);
  NnqpProblem prob;
  prob.q = random_spd(5, rng, 0.2);
  prob.p = Vector(5);
  for (int i = 0; i < 5; ++i) prob.p(i) = rng.normal();
  const Vector base = solve_nnqp(prob);
  for (double c : {1e-3, 0.1, 10.0, 1e4}) {
    NnqpProblem scaled;
    scaled.q = c * prob.q;
    scaled.p = c * prob.p;
    CHECK((solve_nnqp(scaled) - base).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("nnqp rejects a non-positive-definite Q") {
  NnqpProblem prob;
  prob.q = Matrix::Identity(2, 2);
  prob.q(1, 1) = -1.0;
  prob.p = Vector::Ones(2);
  CHECK_THROWS_AS(solve_nnqp(prob), numerical_error);
}

TEST_CASE("box QP agrees with exhaustive three-way enumeration") {
  Rng rng(47, 0);
  const int m = 5;
  for (int rep = 0; rep < 40; ++rep) {
    const Matrix q = random_spd(m, rng, 0.2);
    Vector p(m), ub(m);
    for (int i = 0; i < m; ++i) {
      p(i) = 2.0 * rng.normal();
      ub(i) = rng.bernoulli(0.2) ? std::numeric_limits<double>::infinity()
                                 : rng.uniform(0.0, 1.5);
    }
    const Vector got = solve_box_qp(q, p, ub, nullptr, 1e-12);

    // Enumerate {lower, free, upper} per coordinate.
    Vector best;
    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<int> state(m, 0);
    for (long code = 0; code < 243; ++code) {  // 3^5
      long rest = code;
      bool valid = true;
      for (int i = 0; i < m; ++i) {
        state[i] = rest % 3;
        rest /= 3;
        if (state[i] == 2 && !std::isfinite(ub(i))) valid = false;
      }
      if (!valid) continue;
      Vector x = Vector::Zero(m);
      std::vector<int> free_idx;
      for (int i = 0; i < m; ++i) {
        if (state[i] == 1) free_idx.push_back(i);
        if (state[i] == 2) x(i) = ub(i);
      }
      if (!free_idx.empty()) {
        const int f = static_cast<int>(free_idx.size());
        Matrix qff(f, f);
        Vector rhs(f);
        for (int a = 0; a < f; ++a) {
          rhs(a) = p(free_idx[a]);
          for (int b = 0; b < f; ++b) qff(a, b) = q(free_idx[a], free_idx[b]);
        }
        for (int i = 0; i < m; ++i)
          if (state[i] == 2)
            for (int a = 0; a < f; ++a) rhs(a) -= q(free_idx[a], i) * ub(i);
        const Vector xf = qff.llt().solve(rhs);
        for (int a = 0; a < f; ++a) x(free_idx[a]) = xf(a);
      }
      bool feasible = true;
      for (int i = 0; i < m; ++i)
        if (x(i) < -1e-12 || x(i) > ub(i) + 1e-12) feasible = false;
      if (!feasible) continue;
      const double obj = qp_objective(q, p, x);
      if (obj < best_obj) {
        best_obj = obj;
        best = x;
      }
    }
    CHECK((got - best).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("box QP pins zero-width coordinates") {
  const Matrix q = Matrix::Identity(3, 3);
  Vector p(3), ub(3);
  p << 5, 5, -1;
  ub << 0.0, 2.0, 1.0;
  const Vector x = solve_box_qp(q, p, ub);
  CHECK(x(0) == 0.0);
  CHECK(x(1) == doctest::Approx(2.0));
  CHECK(x(2) == 0.0);
}
