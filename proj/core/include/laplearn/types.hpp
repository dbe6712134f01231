#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>

namespace laplearn {

/// Input validation failure (bad dimensions, malformed matrices, bad flags).
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure (loss of positive definiteness, singular systems).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// The three nested Laplacian classes; Combinatorial ⊂ DiagDominant ⊂ Generalized.
enum class LaplacianClass { Generalized, DiagDominant, Combinatorial };

std::string to_string(LaplacianClass c);
LaplacianClass laplacian_class_from_string(const std::string& s);

// ---------------------------------------------------------------------------

/// Binary symmetric edge mask with zero diagonal. entry(i,j) = 1 means the
/// edge is allowed (weight constrained nonnegative), 0 means it is forced to
/// zero.
class ConnectivityMask {
 public:
  ConnectivityMask() = default;
  explicit ConnectivityMask(Eigen::MatrixXi entries);

  /// All-ones off-diagonal (every edge allowed).
  static ConnectivityMask full(int n);
  /// No edges allowed.
  static ConnectivityMask empty(int n);

  int size() const { return static_cast<int>(entries_.rows()); }
  int operator()(int i, int j) const { return entries_(i, j); }
  const Eigen::MatrixXi& entries() const { return entries_; }

  /// Number of allowed edges, counting each unordered pair once.
  int edge_count() const;
  /// True when the allowed-edge graph has a single connected component.
  bool connected() const;

 private:
  Eigen::MatrixXi entries_;
};

// ---------------------------------------------------------------------------

/// Symmetric positive semidefinite data statistic (sample covariance or
/// kernel matrix).
class StatisticMatrix {
 public:
  StatisticMatrix() = default;
  explicit StatisticMatrix(Matrix s, std::optional<int> sample_count = std::nullopt);

  int size() const { return static_cast<int>(s_.rows()); }
  const Matrix& matrix() const { return s_; }
  std::optional<int> sample_count() const { return sample_count_; }

  /// Largest off-diagonal magnitude, used to scale the regularization grid.
  double max_offdiagonal() const;

 private:
  Matrix s_;
  std::optional<int> sample_count_;
};

enum class StatisticMode { Gaussian, Binary };

/// Builds the data statistic from raw observations.
///
/// Gaussian mode: x is k×n with one sample per row; columns are centered and
/// S = (1/k) XᵀX. Binary mode: x is n×d with one vertex per row and d binary
/// features; rows are centered and S = (1/d) XXᵀ + (1/3) I, the variational
/// correction used for binary data.
StatisticMatrix build_statistic(const Matrix& x, StatisticMode mode);

// ---------------------------------------------------------------------------

/// Symmetric regularization matrix H; Tr(ΘH) realizes a weighted l1 penalty
/// when Θ has nonpositive off-diagonal entries.
class RegularizationMatrix {
 public:
  RegularizationMatrix() = default;
  explicit RegularizationMatrix(Matrix h, std::optional<double> alpha = std::nullopt);

  /// H = α(2I − 11ᵀ): Tr(ΘH) = α‖Θ‖₁ on sign-feasible Θ.
  static RegularizationMatrix l1(int n, double alpha);
  /// H = α(I − 11ᵀ): Tr(ΘH) = α‖Θ‖₁,off (diagonal unpenalized).
  static RegularizationMatrix l1_offdiagonal(int n, double alpha);
  static RegularizationMatrix zero(int n);

  int size() const { return static_cast<int>(h_.rows()); }
  const Matrix& matrix() const { return h_; }
  std::optional<double> alpha() const { return alpha_; }

 private:
  Matrix h_;
  std::optional<double> alpha_;
};

/// K = S + H, the effective statistic the estimators minimize against.
Matrix build_k(const StatisticMatrix& s, const RegularizationMatrix& h);

// ---------------------------------------------------------------------------

/// Dense symmetric matrix tagged with the Laplacian class it is supposed to
/// belong to. Edge weights, degrees and vertex weights are derived views.
class LaplacianMatrix {
 public:
  LaplacianMatrix() = default;
  LaplacianMatrix(Matrix theta, LaplacianClass cls);

  int size() const { return static_cast<int>(theta_.rows()); }
  const Matrix& theta() const { return theta_; }
  Matrix& theta() { return theta_; }
  LaplacianClass laplacian_class() const { return class_; }

  /// W with (W)ij = −(Θ)ij off the diagonal, zero diagonal.
  Matrix edge_weights() const;
  /// Diagonal degree matrix D with (D)ii = Σj (W)ij.
  Vector degrees() const;
  /// Vertex (self-loop) weights (V)ii = Σj (Θ)ij, i.e. the row sums.
  Vector vertex_weights() const;
  /// Mask of nonzero off-diagonal entries.
  ConnectivityMask support(double tol = 0.0) const;

 private:
  Matrix theta_;
  LaplacianClass class_ = LaplacianClass::Generalized;
};

// ---------------------------------------------------------------------------

struct ClassVerdict {
  /// Strictest class satisfied, or nullopt when not even a generalized
  /// Laplacian within tolerance.
  std::optional<LaplacianClass> strictest;
  double offdiagonal_violation = 0.0;   // max positive off-diagonal entry
  double psd_violation = 0.0;           // max(0, -λ_min), relative scale
  double rowsum_negative_violation = 0.0;  // max(0, -(Θ1)_i)
  double rowsum_absolute_violation = 0.0;  // max |(Θ1)_i|

  bool satisfies(LaplacianClass c) const;
};

/// Classifies a symmetric matrix into the strictest Laplacian class it
/// satisfies within tol. Positive semidefiniteness is decided from the
/// smallest eigenvalue of a symmetric eigendecomposition so that singular
/// combinatorial Laplacians validate cleanly.
ClassVerdict validate_class(const Matrix& theta, double tol = 1e-9);

inline ClassVerdict validate_class(const LaplacianMatrix& m, double tol = 1e-9) {
  return validate_class(m.theta(), tol);
}

// Tolerances shared across the artifact.
namespace tol {
inline constexpr double symmetry = 1e-12;
inline constexpr double feasibility = 1e-9;
inline constexpr double kkt_pass = 1e-6;
}  // namespace tol

/// Throws validation_error unless m is symmetric within tol.
void require_symmetric(const Matrix& m, double tol = tol::symmetry, const char* what = "matrix");

}  // namespace laplearn
