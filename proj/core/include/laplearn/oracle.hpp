#pragma once

#include "laplearn/types.hpp"

namespace laplearn {

struct OracleResult {
  Matrix theta;
  double objective = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// Slow, independent reference solver for desk-size instances (n ≤ 10).
///
/// Projected gradient descent in edge-weight/vertex-weight coordinates, where
/// every constraint is a per-coordinate box: edge weights are clamped at zero
/// (the entrywise sign projection), vertex weights are clamped at zero for
/// the diagonally dominant class (the row-sum correction through the
/// diagonal), and the combinatorial class has no vertex weights at all, its
/// diagonal being determined by the off-diagonals. Backtracking line search
/// from unit step with halving and Armijo constant 1e-4; runs until the
/// unit-step gradient mapping norm reaches tol or the iteration cap.
///
/// This solver shares no code path with the block-coordinate estimators.
OracleResult oracle_solve(LaplacianClass problem, const StatisticMatrix& s,
                          const ConnectivityMask& a, const RegularizationMatrix& h,
                          double tolerance = 1e-8, long max_iterations = 1000000);

}  // namespace laplearn
