#pragma once

#include "laplearn/types.hpp"

#include <cstdint>

namespace laplearn {

enum class Topology { Grid, ErdosRenyi, Modular };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

/// Ground-truth graph recipe. Grid graphs place √n×√n vertices with
/// four-neighbor edges; Erdos-Renyi connects each pair with probability p;
/// modular graphs split the vertices into equal modules with separate
/// within/across attachment probabilities. Edge weights are i.i.d.
/// U(weight_lo, weight_hi); vertex weights are either the same or zero,
/// which decides whether the ground truth is diagonally dominant or
/// combinatorial.
struct GraphSpec {
  Topology topology = Topology::Grid;
  int n = 64;
  double p = 0.1;         // Erdos-Renyi attachment probability
  double p_across = 0.1;  // modular: across-module probability
  double p_within = 0.3;  // modular: within-module probability
  int modules = 4;
  double weight_lo = 0.1;
  double weight_hi = 3.0;
  bool zero_vertex_weights = false;
  std::uint64_t seed = 0;

  LaplacianClass ground_truth_class() const {
    return zero_vertex_weights ? LaplacianClass::Combinatorial : LaplacianClass::DiagDominant;
  }
  void validate() const;
};

struct GeneratedGraph {
  LaplacianMatrix laplacian;
  ConnectivityMask mask;
};

/// Draws the graph and its weights. A combinatorial ground truth must be
/// connected, so disconnected random draws are rejected and redrawn on fresh
/// substreams, up to 100 times.
GeneratedGraph generate_graph(const GraphSpec& spec);

/// k i.i.d. samples (one per row) from the zero-mean Gaussian whose
/// precision is l, i.e. covariance L†. The square root comes from a
/// symmetric eigendecomposition with reciprocals of eigenvalues below
/// 1e-10·λ_max zeroed, so combinatorial inputs produce DC-free samples.
Matrix sample_gmrf(const LaplacianMatrix& l, int k, std::uint64_t seed);

/// xᵀLx.
double laplacian_quadratic_form(const LaplacianMatrix& l, const Vector& x);

/// Exchanges round(fraction · #edges) present edges with absent vertex
/// pairs, keeping the mask symmetric and the edge count unchanged.
ConnectivityMask perturb_connectivity(const ConnectivityMask& a, double fraction,
                                      std::uint64_t seed);

}  // namespace laplearn
