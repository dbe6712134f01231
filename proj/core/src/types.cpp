#include "laplearn/types.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

namespace laplearn {

std::string to_string(LaplacianClass c) {
  switch (c) {
    case LaplacianClass::Generalized: return "ggl";
    case LaplacianClass::DiagDominant: return "ddgl";
    case LaplacianClass::Combinatorial: return "cgl";
  }
  return "?";
}

LaplacianClass laplacian_class_from_string(const std::string& s) {
  if (s == "ggl") return LaplacianClass::Generalized;
  if (s == "ddgl") return LaplacianClass::DiagDominant;
  if (s == "cgl") return LaplacianClass::Combinatorial;
  throw validation_error("unknown Laplacian class '" + s + "' (expected ggl|ddgl|cgl)");
}

void require_symmetric(const Matrix& m, double tolerance, const char* what) {
  if (m.rows() != m.cols())
    throw validation_error(std::string(what) + ": not square");
  const double dev = (m - m.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (dev > tolerance * scale)
    throw validation_error(std::string(what) + ": not symmetric (max asymmetry " +
                           std::to_string(dev) + ")");
}

// --- ConnectivityMask -------------------------------------------------------

ConnectivityMask::ConnectivityMask(Eigen::MatrixXi entries) : entries_(std::move(entries)) {
  const int n = static_cast<int>(entries_.rows());
  if (entries_.cols() != n) throw validation_error("connectivity mask: not square");
  for (int i = 0; i < n; ++i) {
    if (entries_(i, i) != 0) throw validation_error("connectivity mask: nonzero diagonal");
    for (int j = 0; j < n; ++j) {
      const int v = entries_(i, j);
      if (v != 0 && v != 1) throw validation_error("connectivity mask: entries must be 0/1");
      if (v != entries_(j, i)) throw validation_error("connectivity mask: not symmetric");
    }
  }
}

ConnectivityMask ConnectivityMask::full(int n) {
  Eigen::MatrixXi e = Eigen::MatrixXi::Ones(n, n);
  e.diagonal().setZero();
  return ConnectivityMask(std::move(e));
}

ConnectivityMask ConnectivityMask::empty(int n) {
  return ConnectivityMask(Eigen::MatrixXi::Zero(n, n));
}

int ConnectivityMask::edge_count() const {
  int c = 0;
  const int n = size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) c += entries_(i, j);
  return c;
}

bool ConnectivityMask::connected() const {
  const int n = size();
  if (n == 0) return true;
  std::vector<int> stack{0};
  std::vector<bool> seen(n, false);
  seen[0] = true;
  int visited = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      if (entries_(u, v) == 1 && !seen[v]) {
        seen[v] = true;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == n;
}

// --- StatisticMatrix --------------------------------------------------------

StatisticMatrix::StatisticMatrix(Matrix s, std::optional<int> sample_count)
    : s_(std::move(s)), sample_count_(sample_count) {
  require_symmetric(s_, tol::symmetry, "statistic");
  s_ = ((s_ + s_.transpose()) * 0.5).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(s_, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < -1e-9 * std::max(1.0, lmax))
    throw validation_error("statistic: not positive semidefinite (λ_min " +
                           std::to_string(lmin) + ")");
}

double StatisticMatrix::max_offdiagonal() const {
  const int n = size();
  double m = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) m = std::max(m, std::abs(s_(i, j)));
  return m;
}

StatisticMatrix build_statistic(const Matrix& x, StatisticMode mode) {
  if (x.rows() < 1) throw validation_error("build_statistic: empty data matrix");
  if (!x.allFinite()) throw validation_error("build_statistic: non-finite entries");
  if (mode == StatisticMode::Gaussian) {
    const auto k = x.rows();
    Matrix centered = x.rowwise() - x.colwise().mean();
    Matrix s = (centered.transpose() * centered) / static_cast<double>(k);
    return StatisticMatrix(std::move(s), static_cast<int>(k));
  }
  // Binary mode: x is n×d, one vertex per row; remove each row's mean across
  // the d features, then S = (1/d) XXᵀ + (1/3) I.
  const auto d = x.cols();
  if (d < 1) throw validation_error("build_statistic: binary mode needs at least one feature");
  Matrix centered = x.colwise() - x.rowwise().mean();
  Matrix s = (centered * centered.transpose()) / static_cast<double>(d);
  s += Matrix::Identity(x.rows(), x.rows()) / 3.0;
  return StatisticMatrix(std::move(s), static_cast<int>(d));
}

// --- RegularizationMatrix ---------------------------------------------------

RegularizationMatrix::RegularizationMatrix(Matrix h, std::optional<double> alpha)
    : h_(std::move(h)), alpha_(alpha) {
  require_symmetric(h_, tol::symmetry, "regularization");
}

RegularizationMatrix RegularizationMatrix::l1(int n, double alpha) {
  if (alpha < 0) throw validation_error("regularization: alpha must be nonnegative");
  Matrix h = -alpha * Matrix::Ones(n, n);
  h.diagonal().setConstant(alpha);  // 2α − α on the diagonal
  return RegularizationMatrix(std::move(h), alpha);
}

RegularizationMatrix RegularizationMatrix::l1_offdiagonal(int n, double alpha) {
  if (alpha < 0) throw validation_error("regularization: alpha must be nonnegative");
  Matrix h = -alpha * Matrix::Ones(n, n);
  h.diagonal().setZero();  // α − α
  return RegularizationMatrix(std::move(h), alpha);
}

RegularizationMatrix RegularizationMatrix::zero(int n) {
  return RegularizationMatrix(Matrix::Zero(n, n), 0.0);
}

Matrix build_k(const StatisticMatrix& s, const RegularizationMatrix& h) {
  if (s.size() != h.size())
    throw validation_error("build_k: dimension mismatch between S and H");
  return s.matrix() + h.matrix();
}

// --- LaplacianMatrix --------------------------------------------------------

LaplacianMatrix::LaplacianMatrix(Matrix theta, LaplacianClass cls)
    : theta_(std::move(theta)), class_(cls) {
  require_symmetric(theta_, tol::symmetry, "laplacian");
}

Matrix LaplacianMatrix::edge_weights() const {
  Matrix w = -theta_;
  w.diagonal().setZero();
  return w;
}

Vector LaplacianMatrix::degrees() const { return edge_weights().rowwise().sum(); }

Vector LaplacianMatrix::vertex_weights() const { return theta_.rowwise().sum(); }

ConnectivityMask LaplacianMatrix::support(double tolerance) const {
  const int n = size();
  Eigen::MatrixXi e = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && std::abs(theta_(i, j)) > tolerance) e(i, j) = 1;
  return ConnectivityMask(std::move(e));
}

// --- validate_class ---------------------------------------------------------

bool ClassVerdict::satisfies(LaplacianClass c) const {
  if (!strictest) return false;
  switch (c) {
    case LaplacianClass::Generalized: return true;
    case LaplacianClass::DiagDominant:
      return *strictest == LaplacianClass::DiagDominant ||
             *strictest == LaplacianClass::Combinatorial;
    case LaplacianClass::Combinatorial: return *strictest == LaplacianClass::Combinatorial;
  }
  return false;
}

ClassVerdict validate_class(const Matrix& theta, double tolerance) {
  require_symmetric(theta, tol::symmetry, "validate_class input");
  const int n = static_cast<int>(theta.rows());

  ClassVerdict v;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) v.offdiagonal_violation = std::max(v.offdiagonal_violation, theta(i, j));
  v.offdiagonal_violation = std::max(0.0, v.offdiagonal_violation);

  Eigen::SelfAdjointEigenSolver<Matrix> es(theta, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  const double scale = std::max(1.0, std::abs(lmax));
  v.psd_violation = std::max(0.0, -lmin / scale);

  const Vector rowsums = theta.rowwise().sum();
  v.rowsum_negative_violation = std::max(0.0, -rowsums.minCoeff());
  v.rowsum_absolute_violation = rowsums.cwiseAbs().maxCoeff();

  const bool ggl = v.offdiagonal_violation <= tolerance && v.psd_violation <= tolerance;
  if (!ggl) {
    v.strictest = std::nullopt;
  } else if (v.rowsum_absolute_violation <= tolerance) {
    v.strictest = LaplacianClass::Combinatorial;
  } else if (v.rowsum_negative_violation <= tolerance) {
    v.strictest = LaplacianClass::DiagDominant;
  } else {
    v.strictest = LaplacianClass::Generalized;
  }
  return v;
}

}  // namespace laplearn
