#include "laplearn/evaluation.hpp"

#include "laplearn/matrix_io.hpp"
#include "laplearn/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace laplearn {

double relative_error(const Matrix& theta_hat, const Matrix& theta_star) {
  if (theta_hat.rows() != theta_star.rows() || theta_hat.cols() != theta_star.cols())
    throw validation_error("relative_error: dimension mismatch");
  const double denom = theta_star.norm();
  if (denom == 0.0) throw validation_error("relative_error: zero ground truth");
  return (theta_hat - theta_star).norm() / denom;
}

double f_score(const Matrix& theta_hat, const Matrix& theta_star, double edge_tol) {
  if (theta_hat.rows() != theta_star.rows() || theta_hat.cols() != theta_star.cols())
    throw validation_error("f_score: dimension mismatch");
  const int n = static_cast<int>(theta_hat.rows());
  long tp = 0, fp = 0, fn = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool est = theta_hat(i, j) < -edge_tol;
      const bool truth = theta_star(i, j) < -edge_tol;
      tp += est && truth;
      fp += est && !truth;
      fn += !est && truth;
    }
  }
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * tp / static_cast<double>(2 * tp + fn + fp);
}

std::vector<double> alpha_grid(const StatisticMatrix& s, int k) {
  if (k < 1) throw validation_error("alpha_grid: sample count must be positive");
  if (s.size() < 2) throw validation_error("alpha_grid: need at least two vertices");
  const double s_max = s.max_offdiagonal();
  const double base = s_max * std::sqrt(std::log(static_cast<double>(s.size())) / k);
  std::vector<double> grid{0.0};
  for (int r = 14; r >= 1; --r) grid.push_back(std::pow(0.75, r) * base);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::string BenchmarkMethod::name() const {
  std::string s = to_string(estimator);
  if (mask == MaskMode::FullMask) {
    s += "-full";
  } else {
    s += "-mask";
    if (mask_mismatch > 0) {
      std::ostringstream os;
      os << "-" << mask_mismatch;
      s += os.str();
    }
  }
  if (!sweep_alpha) s += "-a0";
  return s;
}

void BenchmarkConfig::validate() const {
  graph.validate();
  if (trials < 1) throw validation_error("benchmark: trials must be >= 1");
  if (methods.empty()) throw validation_error("benchmark: no methods selected");
  if (k_over_n.empty()) throw validation_error("benchmark: no k/n values");
  for (double r : k_over_n)
    if (!(r > 0)) throw validation_error("benchmark: k/n values must be positive");
  if (jobs < 1) throw validation_error("benchmark: jobs must be >= 1");
}

const CellAggregate* ExperimentReport::find(const std::string& method, double k_over_n) const {
  for (const auto& c : aggregates)
    if (c.method == method && c.k_over_n == k_over_n) return &c;
  return nullptr;
}

namespace {

std::uint64_t substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  Rng r(seed, a * 0x10001ULL + b);
  return r.next_u64();
}

struct Task {
  int trial;
  int k_index;
};

void run_trial_cell(const BenchmarkConfig& cfg, const Task& task,
                    std::vector<TrialRecord>& out, std::size_t slot_base) {
  const int n = cfg.graph.n;
  const double ratio = cfg.k_over_n[task.k_index];
  const int k = std::max(1, static_cast<int>(std::lround(ratio * n)));

  GraphSpec spec = cfg.graph;
  spec.seed = substream(cfg.seed, task.trial, 0);
  const auto truth = generate_graph(spec);
  const Matrix data =
      sample_gmrf(truth.laplacian, k, substream(cfg.seed, task.trial, 1 + task.k_index));
  const StatisticMatrix stat = build_statistic(data, StatisticMode::Gaussian);

  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    const auto& method = cfg.methods[m];
    TrialRecord rec;
    rec.method = method.name();
    rec.k_over_n = ratio;
    rec.trial = task.trial;
    rec.k = k;
    rec.graph_seed = spec.seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ConnectivityMask mask = method.mask == MaskMode::FullMask ? ConnectivityMask::full(n)
                                                                : truth.mask;
      if (method.mask == MaskMode::TrueMask && method.mask_mismatch > 0)
        mask = perturb_connectivity(mask, method.mask_mismatch,
                                    substream(cfg.seed, task.trial, 9000 + m));

      std::vector<double> alphas =
          method.sweep_alpha ? alpha_grid(stat, k) : std::vector<double>{0.0};

      EstimatorConfig est;
      est.target_class = method.estimator;
      est.epsilon = cfg.epsilon;
      est.max_cycles = cfg.max_cycles;

      bool have_best = false;
      std::string sweep_errors;
      for (double alpha : alphas) {
        try {
          const auto h = RegularizationMatrix::l1(n, alpha);
          const EstimationResult r = method.estimator == LaplacianClass::Combinatorial
                                         ? estimate_cgl(stat, mask, h, est)
                                         : estimate_ggl(stat, mask, h, est);
          const double re = relative_error(r.theta.theta(), truth.laplacian.theta());
          if (!have_best || re < rec.re) {
            have_best = true;
            rec.re = re;
            rec.fs = f_score(r.theta.theta(), truth.laplacian.theta());
            rec.best_alpha = alpha;
            rec.cycles = r.cycles;
            rec.converged = r.converged;
          }
        } catch (const std::exception& e) {
          if (!sweep_errors.empty()) sweep_errors += "; ";
          sweep_errors += e.what();
        }
      }
      if (!have_best)
        rec.error = sweep_errors.empty() ? "no alpha value succeeded" : sweep_errors;
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    out[slot_base + m] = std::move(rec);
  }
}

}  // namespace

ExperimentReport run_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.spec = cfg.graph;
  report.seed = cfg.seed;
  report.trials = cfg.trials;

  const std::size_t cells = static_cast<std::size_t>(cfg.trials) * cfg.k_over_n.size();
  report.records.assign(cells * cfg.methods.size(), TrialRecord{});

  std::vector<Task> tasks;
  tasks.reserve(cells);
  for (int t = 0; t < cfg.trials; ++t)
    for (std::size_t ki = 0; ki < cfg.k_over_n.size(); ++ki)
      tasks.push_back({t, static_cast<int>(ki)});

  const auto worker_body = [&](std::atomic<std::size_t>& next) {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= tasks.size()) break;
      const auto& task = tasks[idx];
      run_trial_cell(cfg, task, report.records, idx * cfg.methods.size());
    }
  };

  if (cfg.jobs <= 1) {
    std::atomic<std::size_t> next{0};
    worker_body(next);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min<int>(cfg.jobs, static_cast<int>(tasks.size()));
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back([&] { worker_body(next); });
    for (auto& th : pool) th.join();
  }

  // Aggregate per (method, k/n), summing in trial order.
  for (const auto& method : cfg.methods) {
    const std::string name = method.name();
    for (double ratio : cfg.k_over_n) {
      CellAggregate cell;
      cell.method = name;
      cell.k_over_n = ratio;
      double re_sum = 0, fs_sum = 0, wall_sum = 0;
      for (const auto& rec : report.records) {
        if (rec.method != name || rec.k_over_n != ratio) continue;
        if (!rec.ok()) {
          ++cell.trials_failed;
          continue;
        }
        ++cell.trials_ok;
        re_sum += rec.re;
        fs_sum += rec.fs;
        wall_sum += rec.wall_ms;
      }
      if (cell.trials_ok > 0) {
        cell.re_mean = re_sum / cell.trials_ok;
        cell.fs_mean = fs_sum / cell.trials_ok;
        cell.wall_ms_mean = wall_sum / cell.trials_ok;
        double re_var = 0, fs_var = 0;
        for (const auto& rec : report.records) {
          if (rec.method != name || rec.k_over_n != ratio || !rec.ok()) continue;
          re_var += (rec.re - cell.re_mean) * (rec.re - cell.re_mean);
          fs_var += (rec.fs - cell.fs_mean) * (rec.fs - cell.fs_mean);
        }
        const int dof = std::max(1, cell.trials_ok - 1);
        cell.re_stddev = std::sqrt(re_var / dof);
        cell.fs_stddev = std::sqrt(fs_var / dof);
      }
      report.aggregates.push_back(std::move(cell));
    }
  }
  return report;
}

// --- emitters ---------------------------------------------------------------

std::string trials_to_csv(const ExperimentReport& report, bool include_timings) {
  std::ostringstream os;
  os << "method,k_over_n,trial,k,graph_seed,best_alpha,re,fs,cycles,converged";
  if (include_timings) os << ",wall_ms";
  os << ",error\n";
  for (const auto& r : report.records) {
    os << r.method << ',' << format_double(r.k_over_n) << ',' << r.trial << ',' << r.k << ','
       << r.graph_seed << ',' << format_double(r.best_alpha) << ',' << format_double(r.re)
       << ',' << format_double(r.fs) << ',' << r.cycles << ',' << (r.converged ? 1 : 0);
    if (include_timings) os << ',' << format_double(r.wall_ms);
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << ',' << err << '\n';
  }
  return os.str();
}

std::string curve_to_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "method,k_over_n,re_mean,re_stddev,fs_mean,fs_stddev,trials_ok\n";
  for (const auto& c : report.aggregates)
    os << c.method << ',' << format_double(c.k_over_n) << ',' << format_double(c.re_mean)
       << ',' << format_double(c.re_stddev) << ',' << format_double(c.fs_mean) << ','
       << format_double(c.fs_stddev) << ',' << c.trials_ok << '\n';
  return os.str();
}

std::string report_to_json(const ExperimentReport& report, bool include_timings) {
  nlohmann::ordered_json j;
  j["spec"] = {{"topology", to_string(report.spec.topology)},
               {"n", report.spec.n},
               {"p", report.spec.p},
               {"p_across", report.spec.p_across},
               {"p_within", report.spec.p_within},
               {"modules", report.spec.modules},
               {"weight_lo", report.spec.weight_lo},
               {"weight_hi", report.spec.weight_hi},
               {"ground_truth", to_string(report.spec.ground_truth_class())}};
  j["seed"] = report.seed;
  j["trials"] = report.trials;
  auto trials = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    nlohmann::ordered_json t{{"method", r.method},     {"k_over_n", r.k_over_n},
                             {"trial", r.trial},       {"k", r.k},
                             {"graph_seed", r.graph_seed}, {"best_alpha", r.best_alpha},
                             {"re", r.re},             {"fs", r.fs},
                             {"cycles", r.cycles},     {"converged", r.converged}};
    if (include_timings) t["wall_ms"] = r.wall_ms;
    if (!r.ok()) t["error"] = r.error;
    trials.push_back(std::move(t));
  }
  j["records"] = std::move(trials);
  auto aggregates = nlohmann::ordered_json::array();
  for (const auto& c : report.aggregates) {
    nlohmann::ordered_json a{{"method", c.method},
                             {"k_over_n", c.k_over_n},
                             {"trials_ok", c.trials_ok},
                             {"trials_failed", c.trials_failed},
                             {"re_mean", c.re_mean},
                             {"re_stddev", c.re_stddev},
                             {"fs_mean", c.fs_mean},
                             {"fs_stddev", c.fs_stddev}};
    if (include_timings) a["wall_ms_mean"] = c.wall_ms_mean;
    aggregates.push_back(std::move(a));
  }
  j["aggregates"] = std::move(aggregates);
  return j.dump(2) + "\n";
}

}  // namespace laplearn
