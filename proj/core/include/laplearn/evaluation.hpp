#pragma once

#include "laplearn/estimator.hpp"
#include "laplearn/synthetic.hpp"
#include "laplearn/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace laplearn {

/// ‖Θ̂ − Θ*‖_F / ‖Θ*‖_F.
double relative_error(const Matrix& theta_hat, const Matrix& theta_star);

/// Harmonic edge-recovery score on the upper triangle; an edge is detected
/// where the off-diagonal entry drops below −edge_tol. Returns 1 when both
/// edge sets are empty.
double f_score(const Matrix& theta_hat, const Matrix& theta_star, double edge_tol = 1e-8);

/// The 15-point regularization sweep {0} ∪ {0.75^r · s_max √(ln n / k)},
/// ascending, duplicates removed (a zero statistic collapses it to {0}).
std::vector<double> alpha_grid(const StatisticMatrix& s, int k);

// ---------------------------------------------------------------------------

enum class MaskMode { TrueMask, FullMask };

struct BenchmarkMethod {
  LaplacianClass estimator = LaplacianClass::Generalized;
  MaskMode mask = MaskMode::TrueMask;
  /// Fraction of true edges randomly exchanged with non-edges before the
  /// masked run (the connectivity-mismatch protocol). Ignored for FullMask.
  double mask_mismatch = 0.0;
  /// Sweep the full alpha grid (selecting by ground-truth relative error);
  /// off means a single run at alpha = 0.
  bool sweep_alpha = true;

  std::string name() const;
};

struct TrialRecord {
  std::string method;
  double k_over_n = 0;
  int trial = 0;
  int k = 0;
  std::uint64_t graph_seed = 0;
  double best_alpha = 0;
  double re = 0;
  double fs = 0;
  int cycles = 0;
  bool converged = false;
  double wall_ms = 0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct CellAggregate {
  std::string method;
  double k_over_n = 0;
  int trials_ok = 0;
  int trials_failed = 0;
  double re_mean = 0, re_stddev = 0;
  double fs_mean = 0, fs_stddev = 0;
  double wall_ms_mean = 0;
};

struct ExperimentReport {
  GraphSpec spec;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<TrialRecord> records;
  std::vector<CellAggregate> aggregates;

  const CellAggregate* find(const std::string& method, double k_over_n) const;
};

struct BenchmarkConfig {
  GraphSpec graph;
  std::vector<double> k_over_n = {0.5, 1, 2, 5, 10, 30, 100, 250, 1000};
  std::vector<BenchmarkMethod> methods;
  int trials = 10;
  std::uint64_t seed = 0;
  double epsilon = 1e-4;
  int max_cycles = 10000;
  int jobs = 1;

  void validate() const;
};

/// Monte-Carlo protocol: per trial a fresh ground truth and dataset are
/// drawn on trial-indexed substreams, the alpha grid is swept cold, and the
/// minimum-RE alpha is reported together with the F-score of that same
/// estimate. All methods in a run share the per-trial data, so masked and
/// unmasked variants are compared paired. Estimator failures are recorded in
/// the trial and excluded from the aggregates without aborting the batch.
ExperimentReport run_benchmark(const BenchmarkConfig& cfg);

// Report emitters. Timing fields are the only run-dependent content; with
// include_timings=false the artifacts are byte-identical across machines for
// a fixed (config, seed).
std::string trials_to_csv(const ExperimentReport& report, bool include_timings = true);
std::string curve_to_csv(const ExperimentReport& report);
std::string report_to_json(const ExperimentReport& report, bool include_timings = true);

}  // namespace laplearn
