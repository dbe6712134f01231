#include "laplearn/estimator.hpp"

#include "estimator_detail.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace laplearn {

double objective_value(const Matrix& theta, const Matrix& k) {
  return detail::trace_product(theta, k) - detail::logdet_llt(theta, "objective_value");
}

double cgl_objective_value(const Matrix& theta, const Matrix& k) {
  const int n = static_cast<int>(theta.rows());
  const double j = 1.0 / n;
  Matrix shifted = theta;
  shifted.array() += j;
  Matrix k_shifted = k;
  k_shifted.array() += j;
  return detail::trace_product(theta, k_shifted) -
         detail::logdet_llt(shifted, "cgl_objective_value");
}

double pseudo_objective(const LaplacianMatrix& theta, const Matrix& k_mat) {
  const int n = theta.size();
  if (k_mat.rows() != n || k_mat.cols() != n)
    throw validation_error("pseudo_objective: dimension mismatch");
  const Matrix& th = theta.theta();
  const double scale = std::max(1.0, th.cwiseAbs().maxCoeff());
  if ((th.rowwise().sum()).cwiseAbs().maxCoeff() > 1e-6 * scale)
    throw validation_error("pseudo_objective: input is not a combinatorial Laplacian");

  // Deflate along the constant vector: the remaining (n-1)-dimensional
  // spectrum is exactly the nonzero part for a connected graph.
  Matrix ones(n, 1);
  ones.setOnes();
  Eigen::HouseholderQR<Matrix> qr(ones);
  const Matrix basis = qr.householderQ() * Matrix::Identity(n, n).rightCols(n - 1);
  const Matrix deflated = basis.transpose() * th * basis;

  Eigen::SelfAdjointEigenSolver<Matrix> es(deflated, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  const double lmax = std::max(ev.maxCoeff(), 0.0);
  if (ev.minCoeff() <= 1e-9 * std::max(1.0, lmax))
    throw validation_error(
        "pseudo_objective: more than one eigenvalue at zero (disconnected graph)");
  return detail::trace_product(th, k_mat) + 0.0 - ev.array().log().sum();
}

int ddgl_projection(Matrix& theta, Matrix& c_inverse) {
  const int n = static_cast<int>(theta.rows());
  int touched = 0;
  for (int i = 0; i < n; ++i) {
    const double rowsum = theta.row(i).sum();
    if (rowsum < 0.0) {
      const double nu = -rowsum;
      theta(i, i) += nu;
      diagonal_rank_one_update(c_inverse, i, nu);
      ++touched;
    }
  }
  return touched;
}

int cgl_projection(Matrix& theta_tilde, Matrix& c_tilde) {
  const int n = static_cast<int>(theta_tilde.rows());
  int touched = 0;
  for (int i = 0; i < n; ++i) {
    const double nu = 1.0 - theta_tilde.row(i).sum();
    if (nu != 0.0) {
      theta_tilde(i, i) += nu;
      diagonal_rank_one_update(c_tilde, i, nu);
      ++touched;
    }
  }
  return touched;
}

}  // namespace laplearn
