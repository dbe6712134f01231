#include "laplearn/kkt.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace laplearn {

KktReport kkt_report(const LaplacianMatrix& theta, const Matrix& k_mat,
                     const ConnectivityMask& a, LaplacianClass problem) {
  const int n = theta.size();
  if (k_mat.rows() != n || k_mat.cols() != n || a.size() != n)
    throw validation_error("kkt_report: dimension mismatch");

  const bool cgl = problem == LaplacianClass::Combinatorial;
  Matrix th = theta.theta();
  Matrix k = k_mat;
  if (cgl) {
    th.array() += 1.0 / n;
    k.array() += 1.0 / n;
  }

  Eigen::LLT<Matrix> llt(th);
  if (llt.info() != Eigen::Success)
    throw numerical_error(cgl ? "kkt_report: Θ + J is singular"
                              : "kkt_report: Θ is singular or indefinite");
  Matrix c = llt.solve(Matrix::Identity(n, n));
  c = ((c + c.transpose()) * 0.5).eval();

  const Matrix residual = c - k;  // the multiplier matrix M
  KktReport rep;
  rep.implied_multipliers = Matrix::Zero(n, n);

  // Row-sum multipliers: absent for the plain problem, sign-constrained for
  // the diagonally dominant one, unconstrained for the combinatorial one.
  Vector mu_row = Vector::Zero(n);
  if (problem == LaplacianClass::Generalized) {
    for (int i = 0; i < n; ++i)
      rep.max_stationarity_residual =
          std::max(rep.max_stationarity_residual, std::abs(residual(i, i)));
  } else if (problem == LaplacianClass::DiagDominant) {
    mu_row = -0.5 * residual.diagonal();
    for (int i = 0; i < n; ++i)
      rep.max_stationarity_residual =
          std::max(rep.max_stationarity_residual, std::max(0.0, -mu_row(i)));
  } else {
    mu_row = 0.5 * residual.diagonal();
  }

  const Vector rowsums = theta.theta().rowwise().sum();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (a(i, j) != 1) continue;  // equality multipliers are free
      double mu1 = residual(i, j);
      if (problem == LaplacianClass::DiagDominant) mu1 += mu_row(i) + mu_row(j);
      if (cgl) mu1 -= mu_row(i) + mu_row(j);
      rep.implied_multipliers(i, j) = rep.implied_multipliers(j, i) = mu1;
      rep.max_stationarity_residual =
          std::max(rep.max_stationarity_residual, std::max(0.0, -mu1));
      rep.max_complementarity_residual =
          std::max(rep.max_complementarity_residual, std::abs(mu1 * theta.theta()(i, j)));
    }
  }
  if (problem == LaplacianClass::DiagDominant) {
    for (int i = 0; i < n; ++i)
      rep.max_complementarity_residual =
          std::max(rep.max_complementarity_residual, std::abs(2.0 * mu_row(i) * rowsums(i)));
  }

  // Feasibility: edge signs, mask zeros, row sums, positive semidefiniteness.
  double feas = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (a(i, j) == 1)
        feas = std::max(feas, theta.theta()(i, j));
      else
        feas = std::max(feas, std::abs(theta.theta()(i, j)));
    }
  }
  if (problem == LaplacianClass::DiagDominant)
    feas = std::max(feas, -rowsums.minCoeff());
  if (cgl) feas = std::max(feas, rowsums.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Matrix> es(theta.theta(), Eigen::EigenvaluesOnly);
  const double lmax = std::max(1.0, std::abs(es.eigenvalues().maxCoeff()));
  feas = std::max(feas, -es.eigenvalues().minCoeff() / lmax);
  rep.max_feasibility_residual = std::max(0.0, feas);

  return rep;
}

}  // namespace laplearn
