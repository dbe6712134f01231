#pragma once

#include "laplearn/types.hpp"

namespace laplearn {

/// First-order optimality residuals for an estimate against its problem data.
/// All residuals are absolute values; a converged estimate keeps every field
/// at or below tol::kkt_pass on well-conditioned desk-scale instances.
struct KktReport {
  double max_stationarity_residual = 0.0;
  double max_complementarity_residual = 0.0;
  double max_feasibility_residual = 0.0;
  /// Reconstructed inequality multipliers on allowed edges, zero elsewhere.
  Matrix implied_multipliers;

  double worst() const {
    return std::max({max_stationarity_residual, max_complementarity_residual,
                     max_feasibility_residual});
  }
};

/// Checks the stationarity identity Θ⁻¹ = K + M (with the shifted matrices
/// for the combinatorial problem), complementary slackness, and feasibility.
/// Multipliers are reconstructed from the residual matrix: equality-edge and
/// row-sum multipliers are read off directly, and sign violations of the
/// inequality multipliers are folded into the stationarity residual.
/// Throws numerical_error when Θ (or Θ + J for the combinatorial problem)
/// is singular.
KktReport kkt_report(const LaplacianMatrix& theta, const Matrix& k_mat,
                     const ConnectivityMask& a, LaplacianClass problem);

}  // namespace laplearn
