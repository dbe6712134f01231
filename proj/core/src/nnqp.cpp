#include "laplearn/nnqp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

namespace laplearn {

namespace {

enum class Status : unsigned char { Lower, Free, Upper };

}  // namespace

Vector solve_box_qp(const Matrix& q, const Vector& p, const Vector& ub,
                    const std::vector<int>* free_hint, double tol,
                    std::vector<int>* free_set_out) {
  const int m = static_cast<int>(q.rows());
  if (q.cols() != m || p.size() != m || ub.size() != m)
    throw validation_error("solve_box_qp: dimension mismatch");
  if (m == 0) return Vector(0);
  for (int i = 0; i < m; ++i)
    if (ub(i) < 0.0) throw validation_error("solve_box_qp: negative upper bound");

  const double y_tol = tol * std::max(1.0, p.cwiseAbs().maxCoeff());
  const double x_tol = tol;

  std::vector<Status> status(m, Status::Lower);
  if (free_hint) {
    for (int i : *free_hint) {
      if (i < 0 || i >= m) throw validation_error("solve_box_qp: bad hint index");
      if (ub(i) > 0.0) status[i] = Status::Free;
    }
  }
  // Zero-width boxes stay pinned at the lower bound.
  for (int i = 0; i < m; ++i)
    if (ub(i) == 0.0) status[i] = Status::Lower;

  Vector x = Vector::Zero(m);
  Vector y = Vector::Zero(m);
  std::vector<int> free_idx;
  free_idx.reserve(m);

  const auto solve_free = [&]() {
    free_idx.clear();
    for (int i = 0; i < m; ++i)
      if (status[i] == Status::Free) free_idx.push_back(i);
    for (int i = 0; i < m; ++i)
      x(i) = (status[i] == Status::Upper) ? ub(i) : 0.0;
    const int f = static_cast<int>(free_idx.size());
    if (f > 0) {
      Matrix qff(f, f);
      Vector rhs(f);
      for (int a = 0; a < f; ++a) {
        rhs(a) = p(free_idx[a]);
        for (int b = 0; b < f; ++b) qff(a, b) = q(free_idx[a], free_idx[b]);
      }
      // Subtract the contribution of variables held at their upper bound.
      for (int i = 0; i < m; ++i) {
        if (status[i] != Status::Upper) continue;
        for (int a = 0; a < f; ++a) rhs(a) -= q(free_idx[a], i) * ub(i);
      }
      Eigen::LLT<Matrix> llt(qff);
      if (llt.info() != Eigen::Success)
        throw numerical_error("solve_box_qp: free-set principal submatrix not positive definite");
      const Vector xf = llt.solve(rhs);
      for (int a = 0; a < f; ++a) x(free_idx[a]) = xf(a);
    }
    y.noalias() = q * x - p;
  };

  solve_free();

  int ninf_best = m + 1;
  int ticks = 3;
  long fallback_pivots = 0;
  const long fallback_limit = std::max<long>(static_cast<long>(m) * m, 32);
  std::vector<int> infeasible;
  infeasible.reserve(m);

  for (;;) {
    infeasible.clear();
    for (int i = 0; i < m; ++i) {
      switch (status[i]) {
        case Status::Free:
          if (x(i) < -x_tol || x(i) > ub(i) + x_tol) infeasible.push_back(i);
          break;
        case Status::Lower:
          if (ub(i) > 0.0 && y(i) < -y_tol) infeasible.push_back(i);
          break;
        case Status::Upper:
          if (y(i) > y_tol) infeasible.push_back(i);
          break;
      }
    }
    if (infeasible.empty()) break;

    const auto flip = [&](int i) {
      if (status[i] == Status::Free)
        status[i] = (x(i) < 0.0) ? Status::Lower : Status::Upper;
      else
        status[i] = Status::Free;
    };

    const int ninf = static_cast<int>(infeasible.size());
    if (ninf < ninf_best) {
      ninf_best = ninf;
      ticks = 3;
      for (int i : infeasible) flip(i);
    } else if (ticks > 0) {
      --ticks;
      for (int i : infeasible) flip(i);
    } else {
      flip(infeasible.back());  // Murty's rule: largest index only
      if (++fallback_pivots > fallback_limit)
        throw numerical_error("solve_box_qp: pivoting did not terminate (cycling)");
    }
    solve_free();
  }

  for (int i = 0; i < m; ++i) x(i) = std::min(std::max(x(i), 0.0), ub(i));
  if (free_set_out) *free_set_out = free_idx;
  return x;
}

Vector solve_nnqp(const NnqpProblem& prob, double tol) {
  const int m = static_cast<int>(prob.q.rows());
  if (prob.q.cols() != m || prob.p.size() != m)
    throw validation_error("solve_nnqp: dimension mismatch");
  if (m == 0) return Vector(0);
  require_symmetric(prob.q, tol::symmetry, "nnqp Q");
  {
    Eigen::LLT<Matrix> llt(prob.q);
    if (llt.info() != Eigen::Success)
      throw numerical_error("solve_nnqp: Q is not positive definite");
  }
  const Vector ub = Vector::Constant(m, std::numeric_limits<double>::infinity());
  return solve_box_qp(prob.q, prob.p, ub,
                      prob.active_set_hint.empty() ? nullptr : &prob.active_set_hint, tol);
}

}  // namespace laplearn
