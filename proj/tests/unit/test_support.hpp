#pragma once

#include "laplearn/rng.hpp"
#include "laplearn/synthetic.hpp"
#include "laplearn/types.hpp"

#include <vector>

namespace laplearn::testing {

inline Matrix random_symmetric(int n, Rng& rng, double scale = 1.0) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = scale * rng.normal();
  return m;
}

inline Matrix random_spd(int n, Rng& rng, double ridge = 0.5) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  Matrix m = a * a.transpose() / n;
  m.diagonal().array() += ridge;
  return m;
}

/// Random symmetric 0/1 mask; optionally unioned with a random spanning tree
/// so the result is connected.
inline ConnectivityMask random_mask(int n, double density, Rng& rng, bool connect = false) {
  Eigen::MatrixXi e = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(density)) e(i, j) = e(j, i) = 1;
  if (connect) {
    for (int v = 1; v < n; ++v) {
      const int u = static_cast<int>(rng.below(v));
      e(u, v) = e(v, u) = 1;
    }
  }
  return ConnectivityMask(std::move(e));
}

/// Statistic drawn from a ground-truth model of the requested class:
/// a random connected support, uniform weights, and k Gaussian samples.
inline StatisticMatrix model_statistic(LaplacianClass cls, int n, int k, Rng& rng,
                                       ConnectivityMask* mask_out = nullptr) {
  GraphSpec spec;
  spec.topology = Topology::ErdosRenyi;
  spec.n = n;
  spec.p = 0.6;
  spec.zero_vertex_weights = cls == LaplacianClass::Combinatorial;
  spec.seed = rng.next_u64();
  const auto g = generate_graph(spec);
  if (mask_out) *mask_out = g.mask;
  return build_statistic(sample_gmrf(g.laplacian, k, rng.next_u64()), StatisticMode::Gaussian);
}

}  // namespace laplearn::testing
