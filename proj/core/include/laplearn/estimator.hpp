#pragma once

#include "laplearn/kkt.hpp"
#include "laplearn/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace laplearn {

struct EstimatorConfig {
  LaplacianClass target_class = LaplacianClass::Generalized;
  /// Stop when ‖Θ̂ − Θ̂_pre‖_F / ‖Θ̂_pre‖_F falls to or below epsilon,
  /// evaluated once per full cycle on the post-projection iterate.
  double epsilon = 1e-4;
  int max_cycles = 10000;
  /// Re-derive the tracked inverse from Θ̂ every this many cycles to bound
  /// floating-point drift; 0 disables the refresh.
  int inverse_refresh_period = 50;

  /// Visit pivots in random order instead of 1…n. Off by default so runs are
  /// comparable across machines.
  bool randomized_order = false;
  std::uint64_t order_seed = 0;

  /// Exact coordinate-descent finishing pass over edge weights (and vertex
  /// weights for the non-combinatorial classes). Each step is a closed-form
  /// one-dimensional minimization with a rank-one inverse update, so the pass
  /// is monotone and terminates at the problem optimum; near an already
  /// converged iterate it costs a handful of no-op sweeps.
  bool polish = true;
  double polish_step_tol = 1e-13;
  int max_polish_sweeps = 2000;

  /// Assert per-update monotone descent and track the worst violations.
  bool debug_checks = false;
  bool record_objective_trace = false;

  void validate() const {
    if (!(epsilon > 0)) throw validation_error("estimator: epsilon must be positive");
    if (max_cycles < 1) throw validation_error("estimator: max_cycles must be >= 1");
  }
};

/// Descent audit collected when debug_checks is on. Increases are relative:
/// Δ / max(1, |objective|).
struct DescentAudit {
  double worst_update_increase = 0.0;      // row/column updates and polish steps
  double worst_projection_increase = 0.0;  // diagonal projection steps
  double worst_cycle_increase = 0.0;       // feasible iterate, cycle over cycle
  long updates = 0;
  long projections = 0;
};

struct EstimationResult {
  LaplacianMatrix theta;
  Matrix c;  // tracked inverse; for the combinatorial class, Ĉ − J
  bool converged = false;
  int cycles = 0;
  double criterion = 0.0;  // last relative-change value
  double objective = 0.0;  // Tr(ΘK) − logdet(Θ), shifted form for CGL
  std::vector<double> objective_trace;
  std::vector<std::string> warnings;
  DescentAudit audit;
};

/// Block-coordinate descent for the generalized (and diagonally dominant)
/// problem. Each pivot row/column is re-solved as a nonnegative QP over the
/// allowed edges; the tracked inverse follows through closed-form partition
/// updates. For the diagonally dominant class the row subproblem carries the
/// pivot row-sum constraint and slack bounds from the other rows, so iterates
/// stay feasible and every step descends.
EstimationResult estimate_ggl(const StatisticMatrix& s, const ConnectivityMask& a,
                              const RegularizationMatrix& h, const EstimatorConfig& cfg);

/// Block-coordinate descent for the combinatorial problem on the rank-one
/// shifted matrix Θ̃ = Θ + (1/n)11ᵀ, with diagonal projection to unit row
/// sums after every cycle and a coordinate-descent polish in edge-weight
/// space. The statistic is centered first (the objective only sees the
/// DC-free part of K on zero-row-sum matrices, so this is an equivalence).
EstimationResult estimate_cgl(const StatisticMatrix& s, const ConnectivityMask& a,
                              const RegularizationMatrix& h, const EstimatorConfig& cfg);

/// Clamps negative row sums to zero through diagonal increments, the closed
/// form of the Frobenius-nearest diagonally dominant correction. The tracked
/// inverse is updated per modified index. Returns the number of touched
/// diagonals.
int ddgl_projection(Matrix& theta, Matrix& c_inverse);

/// Restores unit row sums of the shifted iterate through diagonal updates of
/// either sign, with the matching rank-one inverse updates.
int cgl_projection(Matrix& theta_tilde, Matrix& c_tilde);

/// Tr(ΘK) − log pseudo-determinant of Θ, computed by deflating Θ onto the
/// complement of the constant vector and taking eigenvalues there. Throws
/// when more than one eigenvalue sits at zero (disconnected support) or when
/// Θ has nonzero row sums.
double pseudo_objective(const LaplacianMatrix& theta, const Matrix& k_mat);

/// Tr(ΘK) − logdet(Θ) via Cholesky; throws numerical_error when Θ is not
/// positive definite.
double objective_value(const Matrix& theta, const Matrix& k);

/// The same objective in the shifted combinatorial form:
/// Tr(Θ(K+J)) − logdet(Θ+J).
double cgl_objective_value(const Matrix& theta, const Matrix& k);

}  // namespace laplearn
