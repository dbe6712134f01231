#pragma once

#include "laplearn/estimator.hpp"
#include "laplearn/partition.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <vector>

namespace laplearn::detail {

inline double logdet_llt(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw numerical_error(std::string(what) + ": matrix not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

inline double trace_product(const Matrix& a, const Matrix& b) {
  return (a.array() * b.array()).sum();
}

/// Pivot bookkeeping reused across the row sweep: global index <-> position
/// in the (n-1)-dimensional pivot-deleted frame.
struct PivotFrame {
  int u = 0;
  std::vector<int> global;  // size n-1, global index of local position

  void build(int n, int pivot) {
    u = pivot;
    global.resize(n - 1);
    for (int i = 0, ii = 0; i < n; ++i)
      if (i != pivot) global[ii++] = i;
  }
};

/// Gathers the pivot-deleted partition of C and forms Θ_u⁻¹ from it.
inline void gather_theta_u_inverse(const Matrix& c, const PivotFrame& f, Matrix& theta_u_inv,
                                   Vector& c_vec, double& c_scalar) {
  const int m = static_cast<int>(f.global.size());
  theta_u_inv.resize(m, m);
  c_vec.resize(m);
  c_scalar = c(f.u, f.u);
  for (int a = 0; a < m; ++a) {
    c_vec(a) = c(f.global[a], f.u);
    for (int b = 0; b < m; ++b) theta_u_inv(a, b) = c(f.global[a], f.global[b]);
  }
  theta_u_inv.noalias() -= c_vec * (c_vec.transpose() / c_scalar);
}

/// Writes the updated pivot row/column of Θ and the matching partition of C.
inline void scatter_row(Matrix& theta, Matrix& c, const PivotFrame& f, const Vector& theta_vec,
                        double theta_scalar, const BlockInverseResult& ci) {
  const int m = static_cast<int>(f.global.size());
  theta(f.u, f.u) = theta_scalar;
  c(f.u, f.u) = ci.scalar;
  for (int a = 0; a < m; ++a) {
    const int i = f.global[a];
    theta(i, f.u) = theta_vec(a);
    theta(f.u, i) = theta_vec(a);
    c(i, f.u) = ci.vec(a);
    c(f.u, i) = ci.vec(a);
    for (int b = 0; b < m; ++b) c(i, f.global[b]) = ci.block(a, b);
  }
}

inline void symmetrize(Matrix& m) { m = ((m + m.transpose()) * 0.5).eval(); }

/// Refreshes C = Θ⁻¹ from scratch (Cholesky solve against the identity).
inline void refresh_inverse(const Matrix& theta, Matrix& c, const char* what) {
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success)
    throw numerical_error(std::string(what) + ": iterate lost positive definiteness");
  c = llt.solve(Matrix::Identity(theta.rows(), theta.cols()));
  symmetrize(c);
}

/// Records a debug-mode objective delta; increases are measured relative to
/// max(1, |objective|).
struct DescentTracker {
  bool enabled = false;
  double objective = 0.0;  // running value of the tracked objective
  DescentAudit* audit = nullptr;

  void step(double delta, bool is_projection) {
    if (!enabled) {
      objective += delta;
      return;
    }
    const double rel = std::max(0.0, delta) / std::max(1.0, std::abs(objective));
    if (is_projection) {
      audit->worst_projection_increase = std::max(audit->worst_projection_increase, rel);
      ++audit->projections;
    } else {
      audit->worst_update_increase = std::max(audit->worst_update_increase, rel);
      ++audit->updates;
    }
    objective += delta;
  }

  void cycle_boundary(double exact_objective, bool first_cycle) {
    if (enabled && !first_cycle) {
      const double rel = std::max(0.0, exact_objective - last_cycle_objective_) /
                         std::max(1.0, std::abs(exact_objective));
      audit->worst_cycle_increase = std::max(audit->worst_cycle_increase, rel);
    }
    last_cycle_objective_ = exact_objective;
    objective = exact_objective;
  }

 private:
  double last_cycle_objective_ = 0.0;
};

/// One-dimensional exact minimization along a feasible coordinate direction:
/// f(δ) = δ·a − log(1 + δ·b), minimized over δ ≥ lower (lower ≤ 0). The
/// unconstrained minimizer 1/a − 1/b always stays on the positive side of
/// the singularity at −1/b, so the clamped step keeps the iterate positive
/// definite.
inline double coordinate_step(double a, double b, double lower) {
  return std::max(1.0 / a - 1.0 / b, lower);
}

}  // namespace laplearn::detail
