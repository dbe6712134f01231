#pragma once

#include "laplearn/types.hpp"

#include <vector>

namespace laplearn {

/// minimize ½ βᵀQβ − βᵀp  subject to  β ≥ 0, with Q symmetric positive
/// definite. active_set_hint lists indices to start in the free (passive)
/// set; warm starts change the pivot path, never the solution.
struct NnqpProblem {
  Matrix q;
  Vector p;
  std::vector<int> active_set_hint;
};

/// Block principal pivoting solver in the Lawson-Hanson family. The whole
/// infeasible set is exchanged while the infeasibility count keeps dropping;
/// after three non-improving exchanges it falls back to single-index pivots
/// on the largest infeasible index (Murty's rule), and reports failure if
/// the fallback runs longer than m² pivots.
///
/// On return: β ≥ 0, Qβ − p ≥ −tol·max(1,‖p‖_inf), and β_i (Qβ − p)_i = 0
/// per coordinate up to solver precision.
Vector solve_nnqp(const NnqpProblem& prob, double tol = 1e-10);

/// Box generalization used by the diagonally-dominant row subproblem:
/// minimize ½ βᵀQβ − βᵀp subject to 0 ≤ β ≤ ub (entries of ub may be +inf).
/// free_hint, when given, seeds the free set. No upfront PD validation;
/// a non-PD principal submatrix surfaces as numerical_error.
Vector solve_box_qp(const Matrix& q, const Vector& p, const Vector& ub,
                    const std::vector<int>* free_hint = nullptr, double tol = 1e-10,
                    std::vector<int>* free_set_out = nullptr);

}  // namespace laplearn
