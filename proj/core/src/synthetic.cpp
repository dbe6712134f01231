#include "laplearn/synthetic.hpp"

#include "laplearn/rng.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

namespace laplearn {

std::string to_string(Topology t) {
  switch (t) {
    case Topology::Grid: return "grid";
    case Topology::ErdosRenyi: return "er";
    case Topology::Modular: return "modular";
  }
  return "?";
}

Topology topology_from_string(const std::string& s) {
  if (s == "grid") return Topology::Grid;
  if (s == "er" || s == "erdos-renyi") return Topology::ErdosRenyi;
  if (s == "modular") return Topology::Modular;
  throw validation_error("unknown topology '" + s + "' (expected grid|er|modular)");
}

void GraphSpec::validate() const {
  if (n < 2) throw validation_error("graph spec: need at least two vertices");
  if (p < 0 || p > 1 || p_across < 0 || p_across > 1 || p_within < 0 || p_within > 1)
    throw validation_error("graph spec: probabilities must lie in [0,1]");
  if (weight_lo <= 0 || weight_hi < weight_lo)
    throw validation_error("graph spec: weight interval must satisfy 0 < lo <= hi");
  if (modules < 1) throw validation_error("graph spec: need at least one module");
  if (topology == Topology::Grid) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (side * side != n)
      throw validation_error("graph spec: grid topology needs a perfect-square vertex count");
  }
}

namespace {

Eigen::MatrixXi draw_structure(const GraphSpec& spec, Rng& rng) {
  const int n = spec.n;
  Eigen::MatrixXi e = Eigen::MatrixXi::Zero(n, n);
  switch (spec.topology) {
    case Topology::Grid: {
      const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
      for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
          const int v = r * side + c;
          if (c + 1 < side) e(v, v + 1) = e(v + 1, v) = 1;
          if (r + 1 < side) e(v, v + side) = e(v + side, v) = 1;
        }
      }
      break;
    }
    case Topology::ErdosRenyi: {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (rng.bernoulli(spec.p)) e(i, j) = e(j, i) = 1;
      break;
    }
    case Topology::Modular: {
      // Contiguous modules, sizes as equal as possible.
      std::vector<int> module_of(n);
      const int base = n / spec.modules, extra = n % spec.modules;
      for (int m = 0, v = 0; m < spec.modules; ++m) {
        const int size = base + (m < extra ? 1 : 0);
        for (int t = 0; t < size; ++t) module_of[v++] = m;
      }
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const double prob = module_of[i] == module_of[j] ? spec.p_within : spec.p_across;
          if (rng.bernoulli(prob)) e(i, j) = e(j, i) = 1;
        }
      break;
    }
  }
  return e;
}

}  // namespace

GeneratedGraph generate_graph(const GraphSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const bool need_connected = spec.zero_vertex_weights;
  const int max_retries = 100;

  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    Rng structure_rng(spec.seed, 2 * static_cast<std::uint64_t>(attempt));
    ConnectivityMask mask{draw_structure(spec, structure_rng)};
    if (need_connected && !mask.connected()) {
      if (spec.topology == Topology::Grid)
        throw numerical_error("generate_graph: grid mask unexpectedly disconnected");
      continue;
    }

    Rng weight_rng(spec.seed, 2 * static_cast<std::uint64_t>(attempt) + 1);
    Matrix theta = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (mask(i, j) != 1) continue;
        const double w = weight_rng.uniform(spec.weight_lo, spec.weight_hi);
        theta(i, j) = theta(j, i) = -w;
        theta(i, i) += w;
        theta(j, j) += w;
      }
    }
    if (!spec.zero_vertex_weights)
      for (int i = 0; i < n; ++i) theta(i, i) += weight_rng.uniform(spec.weight_lo, spec.weight_hi);

    return {LaplacianMatrix(std::move(theta), spec.ground_truth_class()), std::move(mask)};
  }
  throw validation_error(
      "generate_graph: could not draw a connected graph for a combinatorial ground truth "
      "after 100 attempts; increase the attachment probability");
}

Matrix sample_gmrf(const LaplacianMatrix& l, int k, std::uint64_t seed) {
  if (k < 1) throw validation_error("sample_gmrf: need at least one sample");
  const int n = l.size();
  Eigen::SelfAdjointEigenSolver<Matrix> es(l.theta());
  if (es.info() != Eigen::Success) throw numerical_error("sample_gmrf: eigendecomposition failed");
  const Vector ev = es.eigenvalues();
  const double lmax = ev.maxCoeff();
  if (ev.minCoeff() < -1e-9 * std::max(1.0, lmax))
    throw validation_error("sample_gmrf: input is indefinite");

  Vector scale(n);
  for (int i = 0; i < n; ++i)
    scale(i) = ev(i) > 1e-10 * std::max(1.0, lmax) ? 1.0 / std::sqrt(ev(i)) : 0.0;
  const Matrix b = es.eigenvectors() * scale.asDiagonal();

  Rng rng(seed, 0xda7a);
  Matrix x(k, n);
  Vector z(n);
  for (int t = 0; t < k; ++t) {
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    x.row(t) = (b * z).transpose();
  }
  return x;
}

double laplacian_quadratic_form(const LaplacianMatrix& l, const Vector& x) {
  if (x.size() != l.size()) throw validation_error("laplacian_quadratic_form: size mismatch");
  return x.dot(l.theta() * x);
}

ConnectivityMask perturb_connectivity(const ConnectivityMask& a, double fraction,
                                      std::uint64_t seed) {
  if (fraction < 0 || fraction > 1)
    throw validation_error("perturb_connectivity: fraction must lie in [0,1]");
  const int n = a.size();
  std::vector<std::pair<int, int>> present, absent;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      (a(i, j) == 1 ? present : absent).emplace_back(i, j);

  const auto m = static_cast<std::size_t>(std::llround(fraction * present.size()));
  if (m > present.size() || m > absent.size())
    throw validation_error("perturb_connectivity: not enough edges/non-edges to exchange");

  Rng rng(seed, 0x5fa9);
  // Partial Fisher-Yates: the first m entries of each list are the exchanges.
  for (std::size_t t = 0; t < m; ++t) {
    std::swap(present[t], present[t + rng.below(present.size() - t)]);
    std::swap(absent[t], absent[t + rng.below(absent.size() - t)]);
  }
  Eigen::MatrixXi e = a.entries();
  for (std::size_t t = 0; t < m; ++t) {
    e(present[t].first, present[t].second) = e(present[t].second, present[t].first) = 0;
    e(absent[t].first, absent[t].second) = e(absent[t].second, absent[t].first) = 1;
  }
  return ConnectivityMask(std::move(e));
}

}  // namespace laplearn
