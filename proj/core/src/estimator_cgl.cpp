#include "laplearn/estimator.hpp"
#include "laplearn/nnqp.hpp"
#include "laplearn/partition.hpp"
#include "laplearn/rng.hpp"

#include "estimator_detail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace laplearn {

namespace {

using detail::DescentTracker;
using detail::PivotFrame;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Removes the constant component from both sides of K. On zero-row-sum
/// matrices the trace term only sees this projection of K, so the problem is
/// unchanged while the shifted statistic gains unit row sums.
Matrix center_statistic(const Matrix& k) {
  const int n = static_cast<int>(k.rows());
  const Vector r = k.rowwise().sum() / n;
  const double total = r.sum() / n;
  Matrix kc = k;
  kc.noalias() -= r * Matrix::Ones(1, n);
  kc.noalias() -= Matrix::Ones(n, 1) * r.transpose();
  kc.array() += total;
  return kc;
}

void row_update(int u, Matrix& theta, Matrix& c, const Matrix& k_shift,
                const std::vector<int>& allowed, PivotFrame& frame, Matrix& theta_u_inv,
                std::vector<int>& warm, DescentTracker& track) {
  const int n = static_cast<int>(theta.rows());
  const int m = n - 1;
  frame.build(n, u);
  Vector c_vec;
  double c_uu;
  detail::gather_theta_u_inverse(c, frame, theta_u_inv, c_vec, c_uu);

  Vector k_vec(m), old_vec(m);
  for (int a = 0; a < m; ++a) {
    k_vec(a) = k_shift(frame.global[a], u);
    old_vec(a) = theta(frame.global[a], u);
  }
  const double kappa = k_shift(u, u);
  const double old_uu = theta(u, u);
  const double shift = 1.0 / n;

  Vector theta_vec = Vector::Constant(m, shift);
  const int ms = static_cast<int>(allowed.size());
  if (ms > 0) {
    Matrix q_sub(ms, ms);
    Vector p(ms);
    const Vector inv_rowsum = theta_u_inv.rowwise().sum();
    for (int a = 0; a < ms; ++a) {
      p(a) = k_vec(allowed[a]) / kappa + shift * inv_rowsum(allowed[a]);
      for (int b = 0; b < ms; ++b) q_sub(a, b) = theta_u_inv(allowed[a], allowed[b]);
    }
    const Vector ub = Vector::Constant(ms, kInf);
    const Vector beta = solve_box_qp(q_sub, p, ub, &warm, 1e-12, &warm);
    for (int a = 0; a < ms; ++a) theta_vec(allowed[a]) -= beta(a);
  }
  const double quad = theta_vec.dot(theta_u_inv * theta_vec);
  const double theta_uu = 1.0 / kappa + quad;

  const auto ci = block_inverse(theta_u_inv, theta_vec, theta_uu);
  if (track.enabled) {
    const double delta_tr =
        2.0 * (theta_vec - old_vec).dot(k_vec) + (theta_uu - old_uu) * kappa;
    track.step(delta_tr + std::log(c_uu) + std::log(ci.scalar), /*is_projection=*/false);
  }
  detail::scatter_row(theta, c, frame, theta_vec, theta_uu, ci);
}

struct EdgeCoordinate {
  int i, j;
  double curvature;
};

int polish_sweep(Matrix& theta, Matrix& c, const std::vector<EdgeCoordinate>& edges,
                 double shift, double k_scale, double step_tol, DescentTracker& track) {
  int steps = 0;
  Vector cb(theta.rows());
  for (const auto& e : edges) {
    if (e.curvature <= 1e-14 * k_scale)
      throw numerical_error(
          "estimate_cgl: objective unbounded along an allowed edge; the statistic is "
          "degenerate (add l1 regularization)");
    const double b = c(e.i, e.i) + c(e.j, e.j) - 2.0 * c(e.i, e.j);
    const double w = shift - theta(e.i, e.j);  // current edge weight
    const double delta = detail::coordinate_step(e.curvature, b, -w);
    if (std::abs(delta) <= step_tol * std::max(1.0, w)) continue;
    theta(e.i, e.i) += delta;
    theta(e.j, e.j) += delta;
    theta(e.i, e.j) -= delta;
    theta(e.j, e.i) -= delta;
    cb = c.col(e.i) - c.col(e.j);
    const double denom = 1.0 + delta * b;
    if (!(denom > 0.0))
      throw numerical_error("estimate_cgl: polish step lost positive definiteness");
    c.noalias() -= (delta / denom) * (cb * cb.transpose());
    if (track.enabled) track.step(delta * e.curvature - std::log1p(delta * b), false);
    ++steps;
  }
  return steps;
}

}  // namespace

EstimationResult estimate_cgl(const StatisticMatrix& s, const ConnectivityMask& a,
                              const RegularizationMatrix& h, const EstimatorConfig& cfg) {
  cfg.validate();
  const int n = s.size();
  if (a.size() != n || h.size() != n)
    throw validation_error("estimate_cgl: dimension mismatch between S, A and H");
  if (n < 2) throw validation_error("estimate_cgl: need at least two vertices");

  EstimationResult result;
  if (!a.connected())
    result.warnings.push_back(
        "estimate_cgl: connectivity mask is disconnected; the zero eigenvalue is no longer "
        "simple and the estimate may not validate as a combinatorial Laplacian");

  const Matrix k_orig = build_k(s, h);
  if (a.edge_count() == 0) {
    // The only zero-row-sum sign-feasible matrix with no edges.
    result.theta = LaplacianMatrix(Matrix::Zero(n, n), LaplacianClass::Combinatorial);
    result.c = Matrix::Zero(n, n);
    result.converged = true;
    result.objective = std::numeric_limits<double>::infinity();
    result.warnings.push_back("estimate_cgl: no allowed edges, returning the zero Laplacian");
    return result;
  }

  const double shift = 1.0 / n;
  Matrix k_shift = center_statistic(k_orig);
  k_shift.array() += shift;

  Matrix theta = Matrix::Zero(n, n);
  Matrix c = Matrix::Zero(n, n);
  c.diagonal() = k_shift.diagonal();
  theta.diagonal() = k_shift.diagonal().cwiseInverse();

  std::vector<std::vector<int>> allowed(n);
  for (int u = 0; u < n; ++u)
    for (int g = 0; g < n; ++g)
      if (g != u && a(g, u) == 1) allowed[u].push_back(g < u ? g : g - 1);
  std::vector<std::vector<int>> warm(n);

  const bool tracking = cfg.debug_checks || cfg.record_objective_trace;
  DescentTracker track;
  track.enabled = cfg.debug_checks;
  track.audit = &result.audit;
  if (tracking) track.cycle_boundary(objective_value(theta, k_shift), true);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng order_rng(cfg.order_seed, 0x0d3f);

  PivotFrame frame;
  Matrix theta_u_inv;
  Matrix theta_pre;
  int cycle = 0;
  while (cycle < cfg.max_cycles) {
    ++cycle;
    theta_pre = theta;
    if (cfg.randomized_order) {
      for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[static_cast<int>(order_rng.below(i + 1))]);
    }
    for (int u : order)
      row_update(u, theta, c, k_shift, allowed[u], frame, theta_u_inv, warm[u], track);

    for (int i = 0; i < n; ++i) {
      const double nu = 1.0 - theta.row(i).sum();
      if (nu != 0.0) {
        if (track.enabled)
          track.step(nu * k_shift(i, i) - std::log1p(nu * c(i, i)), /*is_projection=*/true);
        theta(i, i) += nu;
        diagonal_rank_one_update(c, i, nu);
      }
    }

    detail::symmetrize(c);
    result.criterion = (theta - theta_pre).norm() / theta_pre.norm();
    if (cfg.inverse_refresh_period > 0 && cycle % cfg.inverse_refresh_period == 0)
      detail::refresh_inverse(theta, c, "estimate_cgl");
    if (tracking) {
      const double exact = objective_value(theta, k_shift);
      track.cycle_boundary(exact, cycle == 1);
      if (cfg.record_objective_trace) result.objective_trace.push_back(exact);
    }
    if (result.criterion <= cfg.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.cycles = cycle;
  if (!result.converged)
    result.warnings.push_back("estimate_cgl: stopped at max_cycles before reaching epsilon");

  if (cfg.polish) {
    detail::refresh_inverse(theta, c, "estimate_cgl");
    std::vector<EdgeCoordinate> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (a(i, j) == 1)
          edges.push_back({i, j, k_shift(i, i) + k_shift(j, j) - 2.0 * k_shift(i, j)});
    const double k_scale = std::max(1.0, k_shift.cwiseAbs().maxCoeff());
    int sweep = 0;
    for (; sweep < cfg.max_polish_sweeps; ++sweep) {
      if (polish_sweep(theta, c, edges, shift, k_scale, cfg.polish_step_tol, track) == 0)
        break;
      if ((sweep + 1) % 8 == 0) detail::refresh_inverse(theta, c, "estimate_cgl");
    }
    if (sweep == cfg.max_polish_sweeps) {
      result.warnings.push_back("estimate_cgl: polish pass hit max sweeps before stationarity");
      result.converged = false;
    }
  }

  // Edge moves preserve row sums exactly in exact arithmetic; re-anchor them
  // against roundoff, then re-derive the tracked inverse.
  cgl_projection(theta, c);
  detail::refresh_inverse(theta, c, "estimate_cgl");
  if (tracking) track.cycle_boundary(objective_value(theta, k_shift), false);

  Matrix theta_out = theta;
  theta_out.array() -= shift;
  Matrix c_out = c;
  c_out.array() -= shift;

  const auto verdict = validate_class(theta_out, tol::feasibility);
  if (!verdict.satisfies(LaplacianClass::Combinatorial))
    throw numerical_error(
        "estimate_cgl: internal consistency failure, the recovered matrix does not validate "
        "as a combinatorial Laplacian at 1e-9");

  result.theta = LaplacianMatrix(std::move(theta_out), LaplacianClass::Combinatorial);
  result.c = std::move(c_out);
  result.objective = cgl_objective_value(result.theta.theta(), k_orig);
  return result;
}

}  // namespace laplearn
