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

struct Workspace {
  PivotFrame frame;
  Matrix theta_u_inv;
  Vector c_vec;
  Vector k_vec;
  Vector old_vec;
  Vector theta_vec;
  std::vector<std::vector<int>> warm;  // per-pivot free-set hints
};

// Pivot subproblem with the row-sum forced to zero (vertex weight pinned):
//   minimize −2βᵀq + κ·βᵀ1 − log(βᵀ1 − βᵀQβ)  over 0 ≤ β ≤ ub.
// For a fixed Schur complement s the stationary β solves a box QP with
// p(s) = s(q − (κ/2)1) + ½·1, and g(s) = βᵀ1 − βᵀQβ − s is strictly
// decreasing with slope ≤ −1, so the root sits in [1/κ, 1/κ + g(1/κ)] and
// bisection cannot fail.
double solve_pinned_rowsum(const Matrix& q_sub, const Vector& q_raw, double kappa,
                           const Vector& ub, std::vector<int>* warm, double g_at_lo,
                           Vector& beta) {
  const Vector dir = q_raw.array() - 0.5 * kappa;
  const Vector half = Vector::Constant(q_raw.size(), 0.5);
  const auto eval = [&](double s) {
    beta = solve_box_qp(q_sub, (s * dir + half).eval(), ub, warm, 1e-12, warm);
    return beta.sum() - beta.dot(q_sub * beta) - s;
  };

  double lo = 1.0 / kappa;
  double hi = lo + g_at_lo * (1.0 + 1e-9) + 1e-18;
  double g_hi = eval(hi);
  for (int guard = 0; g_hi > 0 && guard < 64; ++guard) {
    hi += std::max(g_hi, 1e-16);
    g_hi = eval(hi);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (eval(mid) > 0 ? lo : hi) = mid;
  }
  eval(hi);  // keep the realized Schur complement at or above the root
  const double schur = beta.sum() - beta.dot(q_sub * beta);
  if (!(schur > 0.0))
    throw numerical_error("estimate: pinned row-sum subproblem lost positive definiteness");
  return schur;
}

void row_update(int u, Matrix& theta, Matrix& c, const Matrix& k, bool ddgl,
                const std::vector<int>& allowed, Vector& rowsums, Workspace& ws,
                DescentTracker& track) {
  const int n = static_cast<int>(theta.rows());
  const int m = n - 1;
  ws.frame.build(n, u);
  double c_uu;
  detail::gather_theta_u_inverse(c, ws.frame, ws.theta_u_inv, ws.c_vec, c_uu);

  ws.k_vec.resize(m);
  ws.old_vec.resize(m);
  for (int a = 0; a < m; ++a) {
    ws.k_vec(a) = k(ws.frame.global[a], u);
    ws.old_vec(a) = theta(ws.frame.global[a], u);
  }
  const double kappa = k(u, u);
  const double old_uu = theta(u, u);

  const int ms = static_cast<int>(allowed.size());
  Vector beta(ms);
  double theta_uu;
  ws.theta_vec = Vector::Zero(m);

  if (ms == 0) {
    theta_uu = 1.0 / kappa;
  } else {
    Matrix q_sub(ms, ms);
    Vector q_raw(ms);
    for (int a = 0; a < ms; ++a) {
      q_raw(a) = ws.k_vec(allowed[a]);
      for (int b = 0; b < ms; ++b) q_sub(a, b) = ws.theta_u_inv(allowed[a], allowed[b]);
    }
    Vector ub = Vector::Constant(ms, kInf);
    if (ddgl) {
      // Slack of every other row keeps the whole iterate diagonally dominant.
      for (int a = 0; a < ms; ++a) {
        const int g = ws.frame.global[allowed[a]];
        ub(a) = std::max(0.0, rowsums(g) - theta(g, u));
      }
    }
    beta = solve_box_qp(q_sub, (q_raw / kappa).eval(), ub, &ws.warm[u], 1e-12, &ws.warm[u]);
    const double quad = beta.dot(q_sub * beta);
    theta_uu = 1.0 / kappa + quad;
    if (ddgl) {
      const double vertex_weight = theta_uu - beta.sum();
      if (vertex_weight < -1e-12 * std::max(1.0, theta_uu)) {
        solve_pinned_rowsum(q_sub, q_raw, kappa, ub, &ws.warm[u], -vertex_weight, beta);
        theta_uu = beta.sum();
      }
    }
    for (int a = 0; a < ms; ++a) ws.theta_vec(allowed[a]) = -beta(a);
  }

  const auto ci = block_inverse(ws.theta_u_inv, ws.theta_vec, theta_uu);

  if (track.enabled) {
    const double delta_tr =
        2.0 * (ws.theta_vec - ws.old_vec).dot(ws.k_vec) + (theta_uu - old_uu) * kappa;
    const double delta = delta_tr + std::log(c_uu) + std::log(ci.scalar);
    track.step(delta, /*is_projection=*/false);
  }

  detail::scatter_row(theta, c, ws.frame, ws.theta_vec, theta_uu, ci);
  rowsums(u) = theta_uu + ws.theta_vec.sum();
  for (int a = 0; a < m; ++a) rowsums(ws.frame.global[a]) += ws.theta_vec(a) - ws.old_vec(a);
}

struct EdgeCoordinate {
  int i, j;
  double curvature;  // K_ii + K_jj − 2 K_ij
};

int polish_sweep(Matrix& theta, Matrix& c, const Matrix& k,
                 const std::vector<EdgeCoordinate>& edges, bool ddgl, Vector& rowsums,
                 double step_tol, DescentTracker& track) {
  const int n = static_cast<int>(theta.rows());
  const double k_scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  int steps = 0;
  Vector cb(n);
  for (const auto& e : edges) {
    if (e.curvature <= 1e-14 * k_scale)
      throw numerical_error(
          "estimate: objective unbounded along an allowed edge; the statistic is degenerate "
          "(add l1 regularization)");
    const double b = c(e.i, e.i) + c(e.j, e.j) - 2.0 * c(e.i, e.j);
    const double w = -theta(e.i, e.j);
    const double delta = detail::coordinate_step(e.curvature, b, -w);
    if (std::abs(delta) <= step_tol * std::max(1.0, w)) continue;
    theta(e.i, e.i) += delta;
    theta(e.j, e.j) += delta;
    theta(e.i, e.j) -= delta;
    theta(e.j, e.i) -= delta;
    cb = c.col(e.i) - c.col(e.j);
    const double denom = 1.0 + delta * b;
    if (!(denom > 0.0))
      throw numerical_error("estimate: polish step lost positive definiteness");
    c.noalias() -= (delta / denom) * (cb * cb.transpose());
    if (track.enabled) track.step(delta * e.curvature - std::log1p(delta * b), false);
    ++steps;
  }
  for (int i = 0; i < n; ++i) {
    const double lower = ddgl ? -std::max(0.0, rowsums(i)) : -kInf;
    const double delta = detail::coordinate_step(k(i, i), c(i, i), lower);
    if (std::abs(delta) <= step_tol * std::max(1.0, std::abs(theta(i, i)))) continue;
    if (track.enabled) track.step(delta * k(i, i) - std::log1p(delta * c(i, i)), false);
    theta(i, i) += delta;
    diagonal_rank_one_update(c, i, delta);
    rowsums(i) += delta;
    ++steps;
  }
  return steps;
}

}  // namespace

EstimationResult estimate_ggl(const StatisticMatrix& s, const ConnectivityMask& a,
                              const RegularizationMatrix& h, const EstimatorConfig& cfg) {
  cfg.validate();
  if (cfg.target_class == LaplacianClass::Combinatorial)
    throw validation_error("estimate_ggl: combinatorial targets go through estimate_cgl");
  const int n = s.size();
  if (a.size() != n || h.size() != n)
    throw validation_error("estimate_ggl: dimension mismatch between S, A and H");
  const Matrix k = build_k(s, h);
  if (k.diagonal().minCoeff() <= 0.0)
    throw validation_error(
        "estimate_ggl: K = S + H has a nonpositive diagonal entry; the decoupled diagonal "
        "initialization needs K_ii > 0 (try l1 regularization with alpha > 0)");

  const bool ddgl = cfg.target_class == LaplacianClass::DiagDominant;

  EstimationResult result;
  Matrix theta = Matrix::Zero(n, n);
  Matrix c = Matrix::Zero(n, n);
  theta.diagonal() = k.diagonal().cwiseInverse();
  c.diagonal() = k.diagonal();
  Vector rowsums = theta.diagonal();

  std::vector<std::vector<int>> allowed(n);
  for (int u = 0; u < n; ++u)
    for (int g = 0; g < n; ++g)
      if (g != u && a(g, u) == 1) allowed[u].push_back(g < u ? g : g - 1);

  Workspace ws;
  ws.warm.assign(n, {});

  const bool tracking = cfg.debug_checks || cfg.record_objective_trace;
  DescentTracker track;
  track.enabled = cfg.debug_checks;
  track.audit = &result.audit;
  if (tracking) track.cycle_boundary(objective_value(theta, k), /*first_cycle=*/true);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng order_rng(cfg.order_seed, 0x0d3e);

  Matrix theta_pre;
  int cycle = 0;
  while (cycle < cfg.max_cycles) {
    ++cycle;
    theta_pre = theta;
    if (cfg.randomized_order) {
      for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[static_cast<int>(order_rng.below(i + 1))]);
    }
    for (int u : order) row_update(u, theta, c, k, ddgl, allowed[u], rowsums, ws, track);

    if (ddgl) {
      // Feasibility is maintained by the bounded row subproblems; this clamps
      // roundoff-level negatives only.
      for (int i = 0; i < n; ++i) {
        const double rs = theta.row(i).sum();
        if (rs < 0.0) {
          if (track.enabled)
            track.step(-rs * k(i, i) - std::log1p(-rs * c(i, i)), /*is_projection=*/true);
          theta(i, i) -= rs;
          diagonal_rank_one_update(c, i, -rs);
        }
        rowsums(i) = theta.row(i).sum();
      }
    }

    detail::symmetrize(c);
    result.criterion = (theta - theta_pre).norm() / theta_pre.norm();
    if (cfg.inverse_refresh_period > 0 && cycle % cfg.inverse_refresh_period == 0)
      detail::refresh_inverse(theta, c, "estimate_ggl");
    if (tracking) {
      const double exact = objective_value(theta, k);
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
    result.warnings.push_back("estimate_ggl: stopped at max_cycles before reaching epsilon");

  if (cfg.polish) {
    detail::refresh_inverse(theta, c, "estimate_ggl");
    for (int i = 0; i < n; ++i) rowsums(i) = theta.row(i).sum();
    std::vector<EdgeCoordinate> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (a(i, j) == 1) edges.push_back({i, j, k(i, i) + k(j, j) - 2.0 * k(i, j)});
    int sweep = 0;
    for (; sweep < cfg.max_polish_sweeps; ++sweep) {
      if (polish_sweep(theta, c, k, edges, ddgl, rowsums, cfg.polish_step_tol, track) == 0)
        break;
      if ((sweep + 1) % 8 == 0) detail::refresh_inverse(theta, c, "estimate_ggl");
    }
    if (sweep == cfg.max_polish_sweeps) {
      result.warnings.push_back("estimate_ggl: polish pass hit max sweeps before stationarity");
      result.converged = false;
    }
    if (ddgl) ddgl_projection(theta, c);  // clamp polish roundoff
  }

  detail::refresh_inverse(theta, c, "estimate_ggl");
  result.theta = LaplacianMatrix(theta, cfg.target_class);
  result.c = std::move(c);
  result.objective = objective_value(theta, k);
  if (tracking) track.cycle_boundary(result.objective, false);

  const auto verdict = validate_class(theta, tol::feasibility);
  if (!verdict.satisfies(cfg.target_class))
    result.warnings.push_back("estimate_ggl: output failed class validation at 1e-9");
  return result;
}

}  // namespace laplearn
