#include "laplearn/oracle.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <vector>

namespace laplearn {

namespace {

struct Coords {
  std::vector<std::pair<int, int>> edges;  // allowed pairs, i < j
  bool has_vertex_weights = false;
  bool clamp_vertex_weights = false;
};

Matrix assemble(const Coords& coords, const Vector& w, const Vector& v, int n) {
  Matrix theta = Matrix::Zero(n, n);
  if (coords.has_vertex_weights) theta.diagonal() = v;
  for (std::size_t e = 0; e < coords.edges.size(); ++e) {
    const auto [i, j] = coords.edges[e];
    theta(i, j) -= w(e);
    theta(j, i) -= w(e);
    theta(i, i) += w(e);
    theta(j, j) += w(e);
  }
  return theta;
}

}  // namespace

OracleResult oracle_solve(LaplacianClass problem, const StatisticMatrix& s,
                          const ConnectivityMask& a, const RegularizationMatrix& h,
                          double tolerance, long max_iterations) {
  const int n = s.size();
  if (n > 10) throw validation_error("oracle_solve: instances are capped at n = 10");
  if (a.size() != n || h.size() != n) throw validation_error("oracle_solve: dimension mismatch");

  const bool cgl = problem == LaplacianClass::Combinatorial;
  Matrix k = build_k(s, h);
  if (cgl) k.array() += 1.0 / n;

  Coords coords;
  coords.has_vertex_weights = !cgl;
  coords.clamp_vertex_weights = problem == LaplacianClass::DiagDominant;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (a(i, j) == 1) coords.edges.emplace_back(i, j);
  const int ne = static_cast<int>(coords.edges.size());

  Vector w = Vector::Zero(ne);
  Vector v = Vector::Zero(n);
  if (cgl) {
    // Uniform starting weights from the two-vertex closed form averaged over
    // the allowed edges.
    double mean_gap = 0.0;
    for (const auto& [i, j] : coords.edges) mean_gap += k(i, i) + k(j, j) - 2.0 * k(i, j);
    mean_gap /= std::max(1, ne);
    w.setConstant(mean_gap > 0 ? 1.0 / mean_gap : 1.0);
  } else {
    if (k.diagonal().minCoeff() <= 0.0)
      throw validation_error("oracle_solve: K must have a positive diagonal");
    v = k.diagonal().cwiseInverse();
  }

  // Objective and gradient in the box coordinates. For the combinatorial
  // class the matrix argument is already the shifted one.
  const auto evaluate = [&](const Vector& we, const Vector& ve, Matrix* grad_mat) {
    Matrix theta = assemble(coords, we, ve, n);
    if (cgl) theta.array() += 1.0 / n;
    Eigen::LLT<Matrix> llt(theta);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    if (grad_mat) {
      *grad_mat = k - llt.solve(Matrix::Identity(n, n));
      *grad_mat = ((*grad_mat + grad_mat->transpose()) * 0.5).eval();
    }
    return (theta.array() * k.array()).sum() - logdet;
  };

  const auto project = [&](Vector& we, Vector& ve) {
    we = we.cwiseMax(0.0);
    if (coords.clamp_vertex_weights) ve = ve.cwiseMax(0.0);
  };

  Matrix g_mat(n, n);
  Vector gw(ne), gv(n), w_trial(ne), v_trial(n);
  OracleResult out;
  double f = evaluate(w, v, &g_mat);
  if (!std::isfinite(f))
    throw numerical_error("oracle_solve: infeasible start (singular shifted matrix?)");

  long it = 0;
  for (; it < max_iterations; ++it) {
    for (int e = 0; e < ne; ++e) {
      const auto [i, j] = coords.edges[e];
      gw(e) = g_mat(i, i) + g_mat(j, j) - 2.0 * g_mat(i, j);
    }
    if (coords.has_vertex_weights) gv = g_mat.diagonal();

    // Gradient mapping at unit step decides convergence.
    w_trial = w - gw;
    v_trial = coords.has_vertex_weights ? (v - gv).eval() : v;
    project(w_trial, v_trial);
    double mapping = (w - w_trial).squaredNorm();
    if (coords.has_vertex_weights) mapping += (v - v_trial).squaredNorm();
    mapping = std::sqrt(mapping);
    if (mapping <= tolerance) {
      out.converged = true;
      break;
    }

    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      w_trial = w - step * gw;
      v_trial = coords.has_vertex_weights ? (v - step * gv).eval() : v;
      project(w_trial, v_trial);
      double descent = gw.dot(w_trial - w);
      if (coords.has_vertex_weights) descent += gv.dot(v_trial - v);
      const double f_trial = evaluate(w_trial, v_trial, nullptr);
      if (f_trial <= f + 1e-4 * descent) {
        w = w_trial;
        v = v_trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Step underflow: no measurable progress left at double precision.
      out.converged = mapping <= std::sqrt(tolerance);
      break;
    }
    f = evaluate(w, v, &g_mat);
  }

  out.iterations = it;
  out.theta = assemble(coords, w, v, n);
  out.objective = f;
  return out;
}

}  // namespace laplearn
