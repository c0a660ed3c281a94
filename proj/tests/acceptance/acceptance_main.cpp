// Acceptance gate: one pass/fail line per criterion, exit 0 iff all pass.
//
// Every criterion is deterministic (pinned master seeds, thread-invariant
// reductions), so the printed numbers are reproducible bit for bit on any
// machine.  Run with "--only <k>" (repeatable) to execute a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/SVD>

#include "ewad/baselines/baselines.hpp"
#include "ewad/bench/bench.hpp"
#include "ewad/common/rng.hpp"
#include "ewad/completion/completion.hpp"
#include "ewad/core/io.hpp"
#include "ewad/core/types.hpp"
#include "ewad/detector/detector.hpp"
#include "ewad/estimator/estimator.hpp"
#include "ewad/eval/eval.hpp"
#include "ewad/models/models.hpp"
#include "ewad/simgen/simgen.hpp"
#include "support/lp.hpp"

using namespace ewad;

namespace {

struct Criterion {
  bool pass = true;
  std::string details;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!details.empty()) details += "; ";
      details += "FAILED: " + what;
    }
  }
  void note(const std::string& what) {
    if (!details.empty()) details += "; ";
    details += what;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

int worker_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// --- [1] ensemble benchmark reproduction -----------------------------------
// 100 instances, 100 x 100, default parameter ranges, point-band detector.
// Means must reproduce the reference table: ordering
// oracle >= EW > stable-pcp > max(drmf, rmc), AUC(EW) = 0.803 +- 0.05,
// AUC(oracle) = 0.823 +- 0.05, and EW's Frobenius recovery error strictly
// below stable-pcp's.  Runtime budget: 30 minutes of 8-core work, scaled to
// the cores actually present.
Criterion criterion_benchmark() {
  Criterion c;
  const EnsembleRanges ranges;  // benchmark defaults
  const BenchOptions options;   // point band, tuned PCP, untuned capped RMC
  const BenchSummary summary =
      run_bench(100, ranges, 7, worker_threads(), options);

  c.require(summary.oracle.auc >= summary.ew.auc,
            "oracle auc " + fmt(summary.oracle.auc) + " >= ew auc " +
                fmt(summary.ew.auc));
  c.require(summary.ew.auc > summary.pcp.auc,
            "ew auc " + fmt(summary.ew.auc) + " > stable-pcp auc " +
                fmt(summary.pcp.auc));
  c.require(summary.pcp.auc > std::max(summary.drmf.auc, summary.rmc.auc),
            "stable-pcp auc " + fmt(summary.pcp.auc) +
                " > max(drmf, rmc) auc " +
                fmt(std::max(summary.drmf.auc, summary.rmc.auc)));
  c.require(std::abs(summary.ew.auc - 0.803) <= 0.05,
            "ew auc " + fmt(summary.ew.auc) + " within 0.803 +- 0.05");
  c.require(std::abs(summary.oracle.auc - 0.823) <= 0.05,
            "oracle auc " + fmt(summary.oracle.auc) + " within 0.823 +- 0.05");
  c.require(summary.ew.frobenius < summary.pcp.frobenius,
            "ew frob " + fmt(summary.ew.frobenius) + " < stable-pcp frob " +
                fmt(summary.pcp.frobenius));
  const double budget_seconds = 1800.0 * 8.0 / worker_threads();
  c.require(summary.seconds <= budget_seconds,
            "wall " + fmt(summary.seconds) + "s within core-scaled budget " +
                fmt(budget_seconds) + "s");
  c.note("auc oracle/ew/pcp/rmc/drmf = " + fmt(summary.oracle.auc) + "/" +
         fmt(summary.ew.auc) + "/" + fmt(summary.pcp.auc) + "/" +
         fmt(summary.rmc.auc) + "/" + fmt(summary.drmf.auc) + ", frob ew/pcp = " +
         fmt(summary.ew.frobenius) + "/" + fmt(summary.pcp.frobenius) +
         ", " + fmt(summary.seconds) + "s");
  return c;
}

// --- [2] representative ROC setting ----------------------------------------
// Fixed generation parameters, 20 seeds: the detector's mean AUC must come
// within 0.05 of the oracle's.
Criterion criterion_representative() {
  Criterion c;
  BenchOptions options;
  options.run_baselines = false;
  std::vector<double> ew_auc, oracle_auc;
  for (int s = 0; s < 20; ++s) {
    GenerationSpec spec;
    spec.rows = 100;
    spec.cols = 100;
    spec.rank = 3;
    spec.mean_level = 5.0;
    spec.observe_prob = 0.8;
    spec.anom_prob = 0.04;
    spec.alpha = {0.2};
    spec.model = "exp-onset";
    spec.seed = derive_seed(202, static_cast<std::uint64_t>(s));
    const BenchRow row = bench_instance(gen_instance(spec), options);
    ew_auc.push_back(row.ew.auc);
    oracle_auc.push_back(row.oracle.auc);
  }
  const double gap = mean(oracle_auc) - mean(ew_auc);
  c.require(std::abs(gap) <= 0.05,
            "mean auc gap " + fmt(gap) + " within 0.05");
  c.note("mean auc oracle = " + fmt(mean(oracle_auc)) + ", ew = " +
         fmt(mean(ew_auc)) + ", gap = " + fmt(gap));
  return c;
}

// --- [3] FPR control --------------------------------------------------------
// Over 50 instances x the budget grid, the deterministic weighted FPR
// sum(t f*) / sum(f*) must stay below gamma + 1e-9: always for the control
// arm (true rates and parameters plugged in, point band), and in >= 95% of
// the plug-in runs (estimated rates and parameters).
Criterion criterion_fpr() {
  Criterion c;
  const std::vector<double> grid = default_gamma_grid();
  const TheoreticalConstants constants;
  int control_total = 0, control_ok = 0;
  int plugin_total = 0, plugin_ok = 0;
  for (int s = 0; s < 50; ++s) {
    const Instance inst =
        gen_ensemble_member(EnsembleRanges{},
                            derive_seed(303, static_cast<std::uint64_t>(s)));
    const auto gen_model = make_anomaly_model(inst.spec.model);
    const std::vector<double> f_star =
        true_posterior(inst.obs, inst.rates, inst.params, *gen_model);

    // Control arm: the exact posterior band.
    DetectorConfig control;
    control.rank = inst.spec.rank;
    control.band_mode = BandMode::kPoint;
    control.anomaly_model = inst.spec.model;
    const ConfidenceBand control_band = confidence_band(
        inst.obs, inst.rates, inst.params, constants, control, *gen_model);

    // Plug-in arm: full detector with estimated rates and parameters,
    // well-specified working model.
    DetectorConfig plugin;
    plugin.rank = inst.spec.rank;
    plugin.band_mode = BandMode::kPoint;
    plugin.anomaly_model = inst.spec.model;
    plugin.moment_count = 2;
    plugin.seed = inst.spec.seed;
    const DetectionResult det = run_ew(inst.obs, plugin);

    for (double gamma : grid) {
      const Selection ctrl = solve_pew(control_band, inst.obs, gamma);
      ++control_total;
      if (tpr_fpr(ctrl.t, f_star).fpr <= gamma + 1e-9) ++control_ok;

      const Selection plug = solve_pew(det.band, inst.obs, gamma);
      ++plugin_total;
      if (tpr_fpr(plug.t, f_star).fpr <= gamma + 1e-9) ++plugin_ok;
    }
  }
  const double control_rate =
      static_cast<double>(control_ok) / control_total;
  const double plugin_rate = static_cast<double>(plugin_ok) / plugin_total;
  c.require(control_ok == control_total,
            "control arm holds in 100% of cases (got " +
                fmt(100.0 * control_rate) + "%)");
  c.require(plugin_rate >= 0.95, "plug-in arm holds in >= 95% of cases (got " +
                                     fmt(100.0 * plugin_rate) + "%)");
  c.note("control " + std::to_string(control_ok) + "/" +
         std::to_string(control_total) + ", plug-in " +
         std::to_string(plugin_ok) + "/" + std::to_string(plugin_total) +
         " (" + fmt(100.0 * plugin_rate) + "%)");
  return c;
}

// --- [4] greedy equals the LP ----------------------------------------------
// 200 random selection problems with at most 60 entries: the greedy
// objective must match a generic simplex solve to 1e-9 for both the banded
// program and the oracle program.
Criterion criterion_greedy_lp() {
  Criterion c;
  Rng rng = make_rng(404);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(unif(rng) * 60.0);
    SparseObservations obs;
    obs.rows = 1;
    obs.cols = n;
    std::vector<double> lower(n), upper(n), f_star(n);
    ConfidenceBand band;
    for (int i = 0; i < n; ++i) {
      obs.entries.push_back({0, i, 0});
      double a = unif(rng), b = unif(rng);
      lower[i] = std::min(a, b);
      upper[i] = std::max(a, b);
      if (unif(rng) < 0.08) lower[i] = upper[i] = 0.0;
      f_star[i] = unif(rng);
    }
    band.lower = lower;
    band.point = lower;
    band.upper = upper;
    const double gamma = unif(rng);

    const Selection pew = solve_pew(band, obs, gamma);
    const double pew_obj =
        std::accumulate(pew.t.begin(), pew.t.end(), 0.0);
    const double pew_lp = testsupport::selection_lp(upper, lower, gamma);
    worst = std::max(worst, std::abs(pew_obj - pew_lp));

    const Selection oracle = solve_oracle(f_star, obs, gamma);
    const double oracle_obj =
        std::accumulate(oracle.t.begin(), oracle.t.end(), 0.0);
    const double oracle_lp = testsupport::selection_lp(f_star, f_star, gamma);
    worst = std::max(worst, std::abs(oracle_obj - oracle_lp));
  }
  c.require(worst <= 1e-9,
            "max |greedy - lp| = " + fmt(worst) + " <= 1e-9");
  {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << worst;
    c.note("200 trials x 2 programs, max gap " + os.str());
  }
  return c;
}

// --- [5] entrywise error scaling ---------------------------------------------
// Clean completion (no anomalies, full observation, rank 3): the median of
// ||M_hat - M*||_max / sqrt(log(m)/m) over 20 seeds must vary by less than
// 2x across m in {100, 200, 400}.
Criterion criterion_entrywise_scaling() {
  Criterion c;
  std::vector<double> medians;
  for (int n : {100, 200, 400}) {
    std::vector<double> normalized;
    for (int s = 0; s < 20; ++s) {
      GenerationSpec spec;
      spec.rows = n;
      spec.cols = n;
      spec.rank = 3;
      spec.mean_level = 5.0;
      spec.observe_prob = 1.0;
      spec.anom_prob = 0.0;
      spec.seed = derive_seed(505, static_cast<std::uint64_t>(n * 100 + s));
      const Instance inst = gen_instance(spec);
      const RateEstimate est = estimate_rates(inst.obs, 3);
      const RecoveryErrors err = recovery_errors(est.raw, inst.rates);
      normalized.push_back(err.max_abs /
                           std::sqrt(std::log(double(n)) / double(n)));
    }
    medians.push_back(median(normalized));
  }
  const double lo = *std::min_element(medians.begin(), medians.end());
  const double hi = *std::max_element(medians.begin(), medians.end());
  c.require(hi / lo < 2.0, "median ratio " + fmt(hi / lo) + " < 2");
  c.note("normalized medians n=100/200/400 = " + fmt(medians[0]) + "/" +
         fmt(medians[1]) + "/" + fmt(medians[2]) + ", ratio " +
         fmt(hi / lo));
  return c;
}

// --- [6] moment-matching recovery --------------------------------------------
// Thinned truth at 400 x 400, full observation: mean |p_hat - p| and
// |alpha_hat - alpha| over 20 seeds must both be <= 0.05.
Criterion criterion_moment_recovery() {
  Criterion c;
  auto model = make_anomaly_model("poisson-thinned");
  std::vector<double> p_err, a_err;
  for (int s = 0; s < 20; ++s) {
    GenerationSpec spec;
    spec.rows = 400;
    spec.cols = 400;
    spec.rank = 3;
    spec.mean_level = 5.0;
    spec.observe_prob = 1.0;
    spec.anom_prob = 0.2;
    spec.alpha = {0.3};
    spec.model = "poisson-thinned";
    spec.seed = derive_seed(606, static_cast<std::uint64_t>(s));
    const Instance inst = gen_instance(spec);
    const RateEstimate est = estimate_rates(inst.obs, 3);
    DetectorConfig config;
    config.rank = 3;
    config.seed = spec.seed;
    const MomentFit fit = fit_theta(inst.obs, est.clipped, config, *model);
    p_err.push_back(std::abs(fit.theta_hat.p_anom - 0.2));
    a_err.push_back(std::abs(fit.theta_hat.alpha[0] - 0.3));
  }
  c.require(mean(p_err) <= 0.05,
            "mean |p_hat - p| = " + fmt(mean(p_err)) + " <= 0.05");
  c.require(mean(a_err) <= 0.05,
            "mean |alpha_hat - alpha| = " + fmt(mean(a_err)) + " <= 0.05");
  c.note("mean errors p/alpha = " + fmt(mean(p_err)) + "/" +
         fmt(mean(a_err)) + " over 20 seeds");
  return c;
}

// --- [7] minimax lower-bound experiment --------------------------------------
// Regret of the detector against the oracle on the paired-row hard family:
// non-negative, decreasing in n over {50, 100, 200}, and the rate-normalized
// regret sqrt(n) / log(n)^1.5 stays within a 3x band.
Criterion criterion_lowerbound() {
  Criterion c;
  const std::vector<int> sizes = {50, 100, 200};
  LowerBoundSpec base;
  base.c_star = 0.4;
  const std::vector<RegretPoint> points =
      regret_curve(sizes, base, 20, 707, worker_threads());

  std::vector<double> normalized;
  for (std::size_t i = 0; i < points.size(); ++i) {
    c.require(points[i].mean_regret >= 0.0,
              "regret(n=" + std::to_string(points[i].n) + ") = " +
                  fmt(points[i].mean_regret) + " >= 0");
    if (i > 0) {
      c.require(points[i].mean_regret <= points[i - 1].mean_regret,
                "regret decreasing at n=" + std::to_string(points[i].n));
    }
    const double n = points[i].n;
    normalized.push_back(points[i].mean_regret * std::sqrt(n) /
                         std::pow(std::log(n), 1.5));
  }
  const double lo = *std::min_element(normalized.begin(), normalized.end());
  const double hi = *std::max_element(normalized.begin(), normalized.end());
  c.require(lo > 0.0 && hi / lo <= 3.0,
            "normalized regret ratio " + fmt(lo > 0.0 ? hi / lo : -1.0) +
                " <= 3");
  c.note("regret n=50/100/200 = " + fmt(points[0].mean_regret) + "/" +
         fmt(points[1].mean_regret) + "/" + fmt(points[2].mean_regret) +
         ", normalized " + fmt(normalized[0]) + "/" + fmt(normalized[1]) +
         "/" + fmt(normalized[2]));
  return c;
}

// --- [8] property battery -----------------------------------------------------
// Cross-module invariants: posterior equals the brute-force mixture formula
// to 1e-12, pmfs normalize to 1e-6, rank-r truncation is optimal on small
// matrices, baseline objectives descend, instance serialization round-trips
// bit for bit, and ensemble scoring is thread-invariant.
Criterion criterion_properties() {
  Criterion c;
  Rng rng = make_rng(808);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Posterior brute force + pmf normalization for every registered model.
  double worst_posterior = 0.0;
  double worst_mass = 0.0;
  for (const char* id : {"poisson-thinned", "exp-onset", "zero"}) {
    auto model = make_anomaly_model(id);
    for (int trial = 0; trial < 40; ++trial) {
      const double rate = 0.2 + 11.0 * unif(rng);
      ModelParams params;
      params.p_anom = 0.9 * unif(rng);
      params.alpha = {0.02 + 0.96 * unif(rng)};
      const std::int64_t k =
          static_cast<std::int64_t>(unif(rng) * 3.0 * rate);
      const PosteriorComponents post =
          posterior_nonanomaly(k, rate, params, *model);
      const double x = params.p_anom * model->pmf(k, params.alpha, rate);
      const double y =
          (1.0 - params.p_anom) * poisson_probability(k, rate).pmf;
      const double f = x + y > 0.0 ? y / (x + y) : 0.0;
      worst_posterior = std::max(worst_posterior, std::abs(post.f - f));

      double total = 0.0;
      for (std::int64_t j = 0; j <= poisson_k_max(rate) + 3; ++j) {
        total += model->pmf(j, params.alpha, rate);
      }
      worst_mass = std::max(worst_mass, std::abs(total - 1.0));
    }
  }
  c.require(worst_posterior <= 1e-12,
            "posterior brute-force gap " + fmt(worst_posterior) + " <= 1e-12");
  c.require(worst_mass <= 1e-6,
            "pmf normalization gap " + fmt(worst_mass) + " <= 1e-6");

  // Truncation optimality against the sigma tail, all sizes up to 12.
  double worst_svd = 0.0;
  for (int n = 2; n <= 12; ++n) {
    Matrix a(n, n);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) a(i, j) = gauss(rng);
    }
    Eigen::JacobiSVD<Matrix> full(a);
    for (int r = 1; r < n; ++r) {
      const double err = (a - truncated_svd(a, r).reconstruct()).norm();
      double tail = 0.0;
      for (int i = r; i < n; ++i) {
        tail += full.singularValues()(i) * full.singularValues()(i);
      }
      worst_svd = std::max(worst_svd, std::abs(err - std::sqrt(tail)));
    }
  }
  c.require(worst_svd <= 1e-8,
            "rank-r truncation optimality gap " + fmt(worst_svd) + " <= 1e-8");

  // Baseline monotone descent on a fully observed instance.
  {
    GenerationSpec spec;
    spec.rows = 40;
    spec.cols = 40;
    spec.rank = 2;
    spec.mean_level = 5.0;
    spec.observe_prob = 1.0;
    spec.anom_prob = 0.1;
    spec.alpha = {0.1};
    spec.model = "poisson-thinned";
    spec.seed = 88;
    const Instance inst = gen_instance(spec);
    bool descent = true;
    const Decomposition si = soft_impute(inst.obs, 30.0);
    for (std::size_t i = 1; i < si.objective_history.size(); ++i) {
      descent &= si.objective_history[i] <=
                 si.objective_history[i - 1] + 1e-8 * si.objective_history[0];
    }
    const Decomposition pcp = stable_pcp(inst.obs, 0.2, 0.05);
    for (std::size_t i = 1; i < pcp.objective_history.size(); ++i) {
      descent &= pcp.objective_history[i] <=
                 pcp.objective_history[i - 1] +
                     1e-6 * pcp.objective_history[0];
    }
    const Decomposition dr = drmf(inst.obs, 2, 60);
    for (std::size_t i = 1; i < dr.objective_history.size(); ++i) {
      descent &= dr.objective_history[i] <=
                 dr.objective_history[i - 1] +
                     1e-9 * (1.0 + dr.objective_history[0]);
    }
    c.require(descent, "baseline objective descent");
  }

  // Serialization round-trip, bit for bit.
  {
    GenerationSpec spec;
    spec.rows = 17;
    spec.cols = 23;
    spec.rank = 2;
    spec.mean_level = 3.5;
    spec.observe_prob = 0.85;
    spec.anom_prob = 0.12;
    spec.alpha = {0.37};
    spec.model = "exp-onset";
    spec.seed = 999;
    Instance inst = gen_instance(spec);
    InstanceData data;
    data.obs = inst.obs;
    data.rates = inst.rates;
    data.mask = inst.mask;
    data.params = inst.params;
    data.generation = inst.spec;

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ewad_acceptance_io";
    fs::remove_all(dir);
    write_instance(dir, data);
    const InstanceData back = read_instance(dir);
    bool ok = back.obs.entries.size() == data.obs.entries.size();
    for (std::size_t i = 0; ok && i < data.obs.entries.size(); ++i) {
      ok = back.obs.entries[i].row == data.obs.entries[i].row &&
           back.obs.entries[i].col == data.obs.entries[i].col &&
           back.obs.entries[i].count == data.obs.entries[i].count;
    }
    ok = ok && back.rates && back.rates->values == data.rates->values;
    ok = ok && back.mask && back.mask->cells == data.mask->cells;
    ok = ok && back.params && back.params->p_anom == data.params->p_anom &&
         back.params->alpha == data.params->alpha;
    c.require(ok, "instance serialization round-trip");
    fs::remove_all(dir);
  }

  // Thread-count determinism of the ensemble scoring.
  {
    EnsembleRanges ranges;
    ranges.rows = 30;
    ranges.cols = 30;
    BenchOptions options;
    options.run_baselines = false;
    const BenchSummary one = run_bench(4, ranges, 33, 1, options);
    const BenchSummary four = run_bench(4, ranges, 33, 4, options);
    bool same = one.rows.size() == four.rows.size();
    for (std::size_t i = 0; same && i < one.rows.size(); ++i) {
      same = one.rows[i].ew.auc == four.rows[i].ew.auc &&
             one.rows[i].oracle.auc == four.rows[i].oracle.auc &&
             one.rows[i].ew.frobenius == four.rows[i].ew.frobenius;
    }
    same = same && one.ew.auc == four.ew.auc;
    c.require(same, "thread-count determinism of run_bench");
  }

  if (c.pass) c.note("posterior/pmf/svd/descent/io/threads all within bounds");
  return c;
}

struct Entry8 {
  int index;
  const char* name;
  Criterion (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const Entry8 criteria[] = {
      {1, "ensemble benchmark vs reference table", criterion_benchmark},
      {2, "representative ROC setting", criterion_representative},
      {3, "FPR budget guarantee", criterion_fpr},
      {4, "greedy selection equals LP", criterion_greedy_lp},
      {5, "entrywise error scaling", criterion_entrywise_scaling},
      {6, "moment-matching recovery", criterion_moment_recovery},
      {7, "lower-bound regret decay", criterion_lowerbound},
      {8, "property battery", criterion_properties},
  };

  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    }
  }

  bool all_pass = true;
  for (const Entry8& entry : criteria) {
    if (!only.empty() && only.count(entry.index) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Criterion result;
    try {
      result = entry.run();
    } catch (const std::exception& e) {
      result.pass = false;
      result.details = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%d] %-40s %s (%s) [%.1fs]\n", entry.index, entry.name,
                result.pass ? "PASS" : "FAIL", result.details.c_str(),
                elapsed);
    std::fflush(stdout);
    all_pass = all_pass && result.pass;
  }
  return all_pass ? 0 : 1;
}
