#include "ewad/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <utility>

#include "ewad/common/error.hpp"
#include "ewad/common/parallel.hpp"
#include "ewad/common/rng.hpp"
#include "ewad/detector/detector.hpp"
#include "ewad/eval/eval.hpp"

namespace ewad {

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

// Sparse-threshold-to-SVT-threshold ratios swept by the multi-solve curve.
constexpr double kMultiSolveRatios[] = {0.25, 0.5, 1.0, 2.0,
                                        4.0,  8.0, 16.0, 32.0, 64.0};

// ROC sweep for a baseline that scores entries once: the policy at budget c
// selects the ceil(c * N) highest-|score| entries (ties by entry order).
double score_sweep_auc(const std::vector<double>& scores,
                       std::span<const double> f_star,
                       std::span<const double> grid) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  auto policy = [&](double c) {
    std::vector<double> t(n, 0.0);
    auto k = static_cast<std::size_t>(
        std::min<double>(static_cast<double>(n),
                         std::ceil(c * static_cast<double>(n))));
    for (std::size_t i = 0; i < k; ++i) t[order[i]] = 1.0;
    return t;
  };
  return sweep_roc(policy, f_star, grid).auc;
}

std::vector<double> entry_scores(const Matrix& a_hat,
                                 const SparseObservations& obs) {
  std::vector<double> scores;
  scores.reserve(obs.entries.size());
  for (const Entry& entry : obs.entries) {
    scores.push_back(std::abs(a_hat(entry.row, entry.col)));
  }
  return scores;
}

// Fixed theory-scale penalties for the capped max-norm variant: the SVT
// threshold sits at the noise singular radius (sqrt(n) + sqrt(m)) * sigma *
// sqrt(observed fraction) with a plug-in Poisson noise scale sigma =
// sqrt(mean count), and the sparse threshold is 1/sqrt(max(n, m)) of it.
// Unlike the rank-tuned solve used for the plain decomposition, this variant
// runs once at universal constants.
struct PcpPenalties {
  double lambda = 0.0;
  double mu = 0.0;
};

PcpPenalties universal_penalties(const SparseObservations& obs) {
  const auto rows = static_cast<double>(obs.rows);
  const auto cols = static_cast<double>(obs.cols);
  const auto n_obs = static_cast<double>(obs.entries.size());
  const double p_obs = n_obs / (rows * cols);
  double mean_count = 0.0;
  for (const Entry& entry : obs.entries) {
    mean_count += static_cast<double>(entry.count);
  }
  mean_count /= std::max(n_obs, 1.0);
  const double sigma = std::sqrt(std::max(mean_count, 0.0));
  const double svt_tau =
      (std::sqrt(rows) + std::sqrt(cols)) * sigma * std::sqrt(p_obs);
  const double sparse_tau = svt_tau / std::sqrt(std::max(rows, cols));
  PcpPenalties out;
  out.mu = 1.0 / (2.0 * std::max(svt_tau, 1e-12));
  out.lambda = 2.0 * out.mu * sparse_tau;
  return out;
}

MethodScore accumulate(const std::vector<BenchRow>& rows,
                       MethodScore BenchRow::*field) {
  MethodScore mean;
  if (rows.empty()) return mean;
  for (const BenchRow& row : rows) {
    mean.auc += (row.*field).auc;
    mean.frobenius += (row.*field).frobenius;
    mean.max_abs += (row.*field).max_abs;
  }
  const auto count = static_cast<double>(rows.size());
  mean.auc /= count;
  mean.frobenius /= count;
  mean.max_abs /= count;
  return mean;
}

}  // namespace

BenchRow bench_instance(const Instance& inst, const BenchOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  validate_observations(inst.obs);
  validate_rate_matrix(inst.rates);
  const std::vector<double> grid =
      options.grid.empty() ? default_gamma_grid() : options.grid;

  BenchRow row;
  row.spec = inst.spec;

  const auto gen_model = make_anomaly_model(inst.spec.model);
  const std::vector<double> f_star =
      true_posterior(inst.obs, inst.rates, inst.params, *gen_model);

  row.oracle.auc =
      sweep_roc([&](double g) { return solve_oracle(f_star, inst.obs, g).t; },
                f_star, grid)
          .auc;

  DetectorConfig config;
  config.rank = inst.spec.rank;
  config.gamma = grid.front();
  config.moment_count = options.moment_count;
  config.band_mode = BandMode::kPoint;
  config.anomaly_model = options.working_model;
  config.theta_domain = options.theta_domain;
  config.seed = inst.spec.seed;
  config.observe_prob = inst.spec.observe_prob;
  const DetectionResult det = run_ew(inst.obs, config);
  row.ew.auc =
      sweep_roc([&](double g) { return solve_pew(det.band, inst.obs, g).t; },
                f_star, grid)
          .auc;
  const auto working = make_anomaly_model(options.working_model);
  double e_hat = scale_e(det.fit.theta_hat, *working);
  if (e_hat <= 0.0) e_hat = 1.0;
  // The detector's rate estimate is the clipped (valid-rate) matrix it
  // feeds to the bands, de-anomalized by the fitted observation scale.
  const RecoveryErrors ew_err =
      recovery_errors(det.rates.clipped.values, inst.rates, e_hat);
  row.ew.frobenius = ew_err.frobenius;
  row.ew.max_abs = ew_err.max_abs;

  if (options.run_baselines) {
    const TunedPenalty pcp =
        tune_rank_lambda(inst.obs, inst.spec.rank, "stable-pcp",
                         options.pcp_ratio, {}, options.solver);
    if (options.pcp_multi_solve) {
      // One curve point per lambda/mu ratio: re-solve at the tuned SVT
      // threshold and flag the support of the sparse component.
      const double mu = 1.0 / (2.0 * pcp.lambda);
      std::vector<std::pair<double, double>> points{{0.0, 0.0}, {1.0, 1.0}};
      for (const double ratio : kMultiSolveRatios) {
        const Decomposition sol =
            stable_pcp(inst.obs, ratio * mu, mu, {}, options.solver);
        std::vector<double> t;
        t.reserve(inst.obs.entries.size());
        for (const Entry& entry : inst.obs.entries) {
          t.push_back(sol.a_hat(entry.row, entry.col) != 0.0 ? 1.0 : 0.0);
        }
        const DetectionRates rates = tpr_fpr(t, f_star);
        points.emplace_back(rates.fpr, rates.tpr);
      }
      std::sort(points.begin(), points.end());
      row.pcp.auc = auc(points);
    } else {
      row.pcp.auc = score_sweep_auc(
          entry_scores(pcp.solution.a_hat, inst.obs), f_star, grid);
    }
    const RecoveryErrors pcp_err =
        recovery_errors(pcp.solution.m_hat, inst.rates);
    row.pcp.frobenius = pcp_err.frobenius;
    row.pcp.max_abs = pcp_err.max_abs;

    const double cap =
        options.rmc_cap_scale * inst.rates.values.maxCoeff();
    const PcpPenalties universal = universal_penalties(inst.obs);
    const Decomposition rmc = stable_pcp(inst.obs, universal.lambda,
                                         universal.mu, cap, options.solver);
    row.rmc.auc =
        score_sweep_auc(entry_scores(rmc.a_hat, inst.obs), f_star, grid);
    const RecoveryErrors rmc_err = recovery_errors(rmc.m_hat, inst.rates);
    row.rmc.frobenius = rmc_err.frobenius;
    row.rmc.max_abs = rmc_err.max_abs;

    const auto n_obs = static_cast<double>(inst.obs.entries.size());
    auto budget_to_e = [&](double c) {
      auto e = static_cast<std::int64_t>(std::ceil(c * n_obs));
      return std::clamp<std::int64_t>(e, 0,
                                      static_cast<std::int64_t>(n_obs));
    };
    auto drmf_policy = [&](double c) {
      const Decomposition dec =
          drmf(inst.obs, inst.spec.rank, budget_to_e(c), options.solver);
      std::vector<double> t;
      t.reserve(inst.obs.entries.size());
      for (const Entry& entry : inst.obs.entries) {
        t.push_back(dec.a_hat(entry.row, entry.col) != 0.0 ? 1.0 : 0.0);
      }
      return t;
    };
    row.drmf.auc = sweep_roc(drmf_policy, f_star, grid).auc;
    const Decomposition dref = drmf(
        inst.obs, inst.spec.rank, budget_to_e(options.drmf_budget),
        options.solver);
    const RecoveryErrors drmf_err = recovery_errors(dref.m_hat, inst.rates);
    row.drmf.frobenius = drmf_err.frobenius;
    row.drmf.max_abs = drmf_err.max_abs;
  }

  row.seconds = elapsed_seconds(start);
  return row;
}

BenchSummary run_bench(int count, const EnsembleRanges& ranges,
                       std::uint64_t master_seed, int threads,
                       const BenchOptions& options) {
  if (count < 1) throw ValidationError("run_bench: count must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  std::vector<BenchRow> rows(static_cast<std::size_t>(count));
  parallel_for_index(static_cast<std::size_t>(count), threads,
                     [&](std::size_t i) {
                       const Instance inst = gen_ensemble_member(
                           ranges,
                           derive_seed(master_seed,
                                       static_cast<std::uint64_t>(i)));
                       rows[i] = bench_instance(inst, options);
                     });
  return summarize(std::move(rows), elapsed_seconds(start));
}

BenchSummary summarize(std::vector<BenchRow> rows, double seconds) {
  BenchSummary summary;
  summary.oracle = accumulate(rows, &BenchRow::oracle);
  summary.ew = accumulate(rows, &BenchRow::ew);
  summary.pcp = accumulate(rows, &BenchRow::pcp);
  summary.rmc = accumulate(rows, &BenchRow::rmc);
  summary.drmf = accumulate(rows, &BenchRow::drmf);
  summary.rows = std::move(rows);
  summary.seconds = seconds;
  return summary;
}

std::string format_bench_table(const BenchSummary& summary) {
  const std::pair<const char*, const MethodScore*> lines[] = {
      {"oracle", &summary.oracle}, {"entrywise", &summary.ew},
      {"stable-pcp", &summary.pcp}, {"rmc", &summary.rmc},
      {"drmf", &summary.drmf}};
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-12s %8s %12s %10s\n", "method", "auc",
                "frob_err", "max_err");
  out += buf;
  for (const auto& [name, score] : lines) {
    std::snprintf(buf, sizeof(buf), "%-12s %8.4f %12.3f %10.3f\n", name,
                  score->auc, score->frobenius, score->max_abs);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "instances: %zu, wall seconds: %.1f\n",
                summary.rows.size(), summary.seconds);
  out += buf;
  return out;
}

}  // namespace ewad
