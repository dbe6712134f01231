#pragma once

#include "laplearn/types.hpp"

namespace laplearn {

/// Pivot-row partition of a symmetric n×n matrix M:
///   block  = M with row/column u deleted           ((n−1)×(n−1))
///   vec    = column u of M without the pivot entry ((n−1)-vector)
///   scalar = M(u, u)
/// Implemented with index bookkeeping; no permutation matrices are formed.
struct RowPartition {
  int u = 0;
  Matrix block;
  Vector vec;
  double scalar = 0.0;

  int full_size() const { return static_cast<int>(block.rows()) + 1; }
};

/// Splits m around pivot u (0-based). Reassembly is bit-exact.
RowPartition partition(const Matrix& m, int u);

/// Inverse of partition: rebuilds the full matrix.
Matrix reassemble(const RowPartition& p);

/// Writes a partition's vec/scalar back into row/column u of m in place,
/// leaving the off-pivot block untouched.
void write_row(Matrix& m, int u, const Vector& vec, double scalar);

struct BlockInverseResult {
  Matrix block;    // C_u
  Vector vec;      // c_u
  double scalar;   // c_u diagonal entry = 1/(θ_u − θᵤᵀ Θ_u⁻¹ θᵤ)
};

/// Given Θ_u⁻¹ and the updated pivot row (θ_u, θ_uu), produces the matching
/// partition of C = Θ⁻¹:
///   c_scalar = 1/(θ_uu − θ_uᵀ Θ_u⁻¹ θ_u)
///   c_vec    = −Θ_u⁻¹ θ_u · c_scalar
///   C_u      = Θ_u⁻¹ + c_vec c_vecᵀ / c_scalar
/// Throws numerical_error when the pivot Schur complement is not positive,
/// i.e. the update would destroy positive definiteness.
BlockInverseResult block_inverse(const Matrix& theta_u_inverse, const Vector& theta_vec,
                                 double theta_scalar);

/// Recovers Θ_u⁻¹ from the partition of C without inverting anything:
/// Θ_u⁻¹ = C_u − c_u c_uᵀ / c_uu. Requires c_uu > 0.
Matrix extract_theta_u_inverse(const RowPartition& c_partition);

/// Sherman-Morrison update of C = Θ⁻¹ after Θ_ii += nu:
///   C ← C − nu · C e_i e_iᵀ C / (1 + nu C_ii)
/// Throws numerical_error when the denominator is not positive.
void diagonal_rank_one_update(Matrix& c, int i, double nu);

/// General symmetric rank-one form: C = Θ⁻¹ becomes (Θ + nu b bᵀ)⁻¹ in place.
/// Same positivity requirement on 1 + nu bᵀCb.
void rank_one_update(Matrix& c, const Vector& b, double nu);

}  // namespace laplearn
