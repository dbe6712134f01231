#include "laplearn/partition.hpp"

namespace laplearn {

RowPartition partition(const Matrix& m, int u) {
  const int n = static_cast<int>(m.rows());
  if (u < 0 || u >= n) throw validation_error("partition: pivot index out of range");
  RowPartition p;
  p.u = u;
  p.block.resize(n - 1, n - 1);
  p.vec.resize(n - 1);
  p.scalar = m(u, u);
  for (int i = 0, ii = 0; i < n; ++i) {
    if (i == u) continue;
    p.vec(ii) = m(i, u);
    for (int j = 0, jj = 0; j < n; ++j) {
      if (j == u) continue;
      p.block(ii, jj) = m(i, j);
      ++jj;
    }
    ++ii;
  }
  return p;
}

Matrix reassemble(const RowPartition& p) {
  const int n = p.full_size();
  Matrix m(n, n);
  m(p.u, p.u) = p.scalar;
  for (int i = 0, ii = 0; i < n; ++i) {
    if (i == p.u) continue;
    m(i, p.u) = p.vec(ii);
    m(p.u, i) = p.vec(ii);
    for (int j = 0, jj = 0; j < n; ++j) {
      if (j == p.u) continue;
      m(i, j) = p.block(ii, jj);
      ++jj;
    }
    ++ii;
  }
  return m;
}

void write_row(Matrix& m, int u, const Vector& vec, double scalar) {
  const int n = static_cast<int>(m.rows());
  m(u, u) = scalar;
  for (int i = 0, ii = 0; i < n; ++i) {
    if (i == u) continue;
    m(i, u) = vec(ii);
    m(u, i) = vec(ii);
    ++ii;
  }
}

BlockInverseResult block_inverse(const Matrix& theta_u_inverse, const Vector& theta_vec,
                                 double theta_scalar) {
  BlockInverseResult r;
  const Vector t = theta_u_inverse * theta_vec;
  const double schur = theta_scalar - theta_vec.dot(t);
  if (!(schur > 0.0))
    throw numerical_error("block_inverse: nonpositive pivot Schur complement (" +
                          std::to_string(schur) + "), positive definiteness lost");
  r.scalar = 1.0 / schur;
  r.vec = -t * r.scalar;
  r.block = theta_u_inverse + r.vec * r.vec.transpose() / r.scalar;
  return r;
}

Matrix extract_theta_u_inverse(const RowPartition& c_partition) {
  if (!(c_partition.scalar > 0.0))
    throw numerical_error("extract_theta_u_inverse: pivot entry of C must be positive");
  return c_partition.block -
         c_partition.vec * c_partition.vec.transpose() / c_partition.scalar;
}

void diagonal_rank_one_update(Matrix& c, int i, double nu) {
  if (nu == 0.0) return;
  const double denom = 1.0 + nu * c(i, i);
  if (!(denom > 0.0))
    throw numerical_error("diagonal_rank_one_update: singular update (1 + nu*C_ii = " +
                          std::to_string(denom) + ")");
  const Vector ci = c.col(i);
  c.noalias() -= (nu / denom) * (ci * ci.transpose());
}

void rank_one_update(Matrix& c, const Vector& b, double nu) {
  if (nu == 0.0) return;
  const Vector cb = c * b;
  const double denom = 1.0 + nu * b.dot(cb);
  if (!(denom > 0.0))
    throw numerical_error("rank_one_update: singular update, positive definiteness lost");
  c.noalias() -= (nu / denom) * (cb * cb.transpose());
}

}  // namespace laplearn
