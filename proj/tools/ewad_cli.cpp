// Command-line driver: generate synthetic instances, run the entrywise
// detector and the decomposition baselines, sweep ROC curves, and reproduce
// the ensemble benchmark and the minimax lower-bound experiment.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ewad/baselines/baselines.hpp"
#include "ewad/bench/bench.hpp"
#include "ewad/common/error.hpp"
#include "ewad/common/parallel.hpp"
#include "ewad/core/io.hpp"
#include "ewad/core/types.hpp"
#include "ewad/detector/detector.hpp"
#include "ewad/estimator/estimator.hpp"
#include "ewad/eval/eval.hpp"
#include "ewad/models/models.hpp"
#include "ewad/simgen/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = EWAD_THREADS env or hardware concurrency
  fs::path out = ".";
};

int effective_threads(const GlobalOptions& g) {
  if (g.threads > 0) return g.threads;
  if (const char* env = std::getenv("EWAD_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 0;  // resolved to hardware concurrency downstream
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ewad::Error("cannot open for writing: " + file.string());
  out << text;
  if (!out) throw ewad::Error("write failed: " + file.string());
}

// --- generate -------------------------------------------------------------

struct GenerateArgs {
  ewad::GenerationSpec spec;
  double alpha = 0.2;
};

void cmd_generate(const GlobalOptions& g, GenerateArgs& args) {
  args.spec.alpha = {args.alpha};
  args.spec.seed = g.seed;
  ewad::Instance inst = ewad::gen_instance(args.spec);
  ewad::InstanceData data;
  data.obs = std::move(inst.obs);
  data.rates = std::move(inst.rates);
  data.mask = std::move(inst.mask);
  data.params = inst.params;
  data.generation = inst.spec;
  ewad::write_instance(g.out, data);
  std::printf("generated %dx%d instance with %zu observed entries at %s\n",
              args.spec.rows, args.spec.cols, data.obs.entries.size(),
              g.out.string().c_str());
}

// --- detect ---------------------------------------------------------------

struct DetectArgs {
  fs::path instance;
  ewad::DetectorConfig config;
  std::string band = "point";
  double observe_prob = -1.0;  // <0 = unknown
  ewad::TheoreticalConstants constants;
  int rank = 0;  // 0 = use generation spec's rank
};

ewad::BandMode parse_band(const std::string& name) {
  if (name == "point") return ewad::BandMode::kPoint;
  if (name == "theoretical") return ewad::BandMode::kTheoretical;
  if (name == "fixed") return ewad::BandMode::kFixed;
  throw ewad::ValidationError("unknown band mode: " + name);
}

void cmd_detect(const GlobalOptions& g, DetectArgs& args) {
  ewad::InstanceData data = ewad::read_instance(args.instance);
  args.config.band_mode = parse_band(args.band);
  args.config.seed = g.seed;
  if (args.observe_prob >= 0.0) args.config.observe_prob = args.observe_prob;
  if (args.rank > 0) {
    args.config.rank = args.rank;
  } else if (data.generation) {
    args.config.rank = data.generation->rank;
  } else {
    throw ewad::ValidationError(
        "detect: --rank is required when the instance has no generation "
        "spec");
  }

  ewad::DetectionResult result =
      ewad::run_ew(data.obs, args.config, args.constants);

  fs::create_directories(g.out);
  std::vector<ewad::DetectionRow> rows;
  rows.reserve(data.obs.entries.size());
  for (std::size_t i = 0; i < data.obs.entries.size(); ++i) {
    const ewad::Entry& e = data.obs.entries[i];
    ewad::DetectionRow row;
    row.row = e.row;
    row.col = e.col;
    row.t = result.selection.t[i];
    row.f_lower = result.band.lower[i];
    row.f_point = result.band.point[i];
    row.f_upper = result.band.upper[i];
    row.selected = result.mask.contains(e.row, e.col);
    rows.push_back(row);
  }
  ewad::write_detection_csv(g.out / "detection.csv", rows);

  json fit;
  fit["rank"] = args.config.rank;
  fit["gamma"] = args.config.gamma;
  fit["band_mode"] = args.band;
  fit["working_model"] = args.config.anomaly_model;
  fit["p_anom_hat"] = result.fit.theta_hat.p_anom;
  fit["alpha_hat"] = result.fit.theta_hat.alpha;
  fit["objective"] = result.fit.objective_value;
  fit["converged"] = result.fit.converged;
  const auto model = ewad::make_anomaly_model(args.config.anomaly_model);
  fit["scale_e"] = ewad::scale_e(result.fit.theta_hat, *model);
  fit["band_half_width"] =
      ewad::band_half_width(data.obs, args.constants, args.config);
  fit["budget"] = result.selection.budget;
  fit["spent"] = result.selection.spent;
  fit["selected_cells"] = result.mask.cells.size();
  write_text(g.out / "fit.json", fit.dump(2) + "\n");
  std::printf(
      "detect: p_anom_hat=%.6g alpha_hat=%s selected=%zu of %zu -> %s\n",
      result.fit.theta_hat.p_anom,
      result.fit.theta_hat.alpha.empty()
          ? "[]"
          : ewad::format_double(result.fit.theta_hat.alpha[0]).c_str(),
      result.mask.cells.size(), data.obs.entries.size(),
      g.out.string().c_str());
}

// --- baseline -------------------------------------------------------------

struct BaselineArgs {
  fs::path instance;
  std::string method = "stable-pcp";
  double lambda = 0.0;  // 0 = tune to rank
  double ratio = 1.0;
  double cap = 0.0;  // rmc cap; required for method rmc
  int rank = 0;      // 0 = generation spec's rank
  double budget = 0.1;
  ewad::SolverOptions solver;
};

void cmd_baseline(const GlobalOptions& g, BaselineArgs& args) {
  ewad::InstanceData data = ewad::read_instance(args.instance);
  int rank = args.rank;
  if (rank <= 0) {
    if (!data.generation) {
      throw ewad::ValidationError(
          "baseline: --rank is required when the instance has no generation "
          "spec");
    }
    rank = data.generation->rank;
  }

  ewad::Decomposition dec;
  json meta;
  meta["method"] = args.method;
  if (args.method == "soft-impute") {
    if (args.lambda > 0.0) {
      dec = ewad::soft_impute(data.obs, args.lambda, args.solver);
      meta["lambda"] = args.lambda;
    } else {
      ewad::TunedPenalty tuned = ewad::tune_rank_lambda(
          data.obs, rank, "soft-impute", args.ratio, {}, args.solver);
      dec = std::move(tuned.solution);
      meta["lambda"] = tuned.lambda;
      meta["achieved_rank"] = tuned.achieved_rank;
      meta["matched_rank"] = tuned.matched;
    }
  } else if (args.method == "stable-pcp" || args.method == "rmc") {
    std::optional<double> cap;
    if (args.method == "rmc") {
      if (args.cap <= 0.0) {
        throw ewad::ValidationError("baseline: rmc requires --cap > 0");
      }
      cap = args.cap;
    }
    if (args.lambda > 0.0) {
      // Interpret --lambda as the SVT threshold q = 1 / (2 mu).
      double mu = 1.0 / (2.0 * args.lambda);
      dec = ewad::stable_pcp(data.obs, args.ratio * mu, mu, cap, args.solver);
      meta["svt_threshold"] = args.lambda;
    } else {
      ewad::TunedPenalty tuned = ewad::tune_rank_lambda(
          data.obs, rank, "stable-pcp", args.ratio, cap, args.solver);
      dec = std::move(tuned.solution);
      meta["svt_threshold"] = tuned.lambda;
      meta["achieved_rank"] = tuned.achieved_rank;
      meta["matched_rank"] = tuned.matched;
    }
    meta["ratio"] = args.ratio;
    if (cap) meta["cap"] = *cap;
  } else if (args.method == "drmf") {
    auto e = static_cast<std::int64_t>(
        std::ceil(args.budget * static_cast<double>(data.obs.entries.size())));
    dec = ewad::drmf(data.obs, rank, e, args.solver);
    meta["budget_e"] = e;
  } else {
    throw ewad::ValidationError("unknown baseline method: " + args.method);
  }

  meta["iterations"] = dec.iterations;
  meta["converged"] = dec.converged;
  meta["objective"] = dec.objective;
  meta["rank"] = rank;
  meta["numerical_rank"] = ewad::numerical_rank(dec.m_hat);
  if (data.rates) {
    ewad::RecoveryErrors err = ewad::recovery_errors(dec.m_hat, *data.rates);
    meta["frobenius_error"] = err.frobenius;
    meta["max_abs_error"] = err.max_abs;
  }

  fs::create_directories(g.out);
  ewad::write_dense_csv(g.out / "m_hat.csv", dec.m_hat);
  ewad::write_dense_csv(g.out / "a_hat.csv", dec.a_hat);
  write_text(g.out / "baseline.json", meta.dump(2) + "\n");
  std::printf("baseline %s: iterations=%d converged=%d objective=%.6g -> %s\n",
              args.method.c_str(), dec.iterations, dec.converged ? 1 : 0,
              dec.objective, g.out.string().c_str());
}

// --- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  fs::path instance;
  std::string method = "ew";
  std::string working_model = "poisson-thinned";
  std::string band = "point";
  double ratio = 1.0;
  double cap_scale = 2.0;
  int rank = 0;
  ewad::SolverOptions solver;
};

std::vector<ewad::SweepRow> to_sweep_rows(const ewad::RocCurve& curve) {
  std::vector<ewad::SweepRow> rows;
  rows.reserve(curve.points.size());
  for (const ewad::RocPoint& p : curve.points) {
    rows.push_back({p.param, p.fpr, p.tpr});
  }
  return rows;
}

void cmd_evaluate(const GlobalOptions& g, EvaluateArgs& args) {
  ewad::InstanceData data = ewad::read_instance(args.instance);
  if (!data.rates || !data.params || !data.generation) {
    throw ewad::ValidationError(
        "evaluate: instance must carry rates, params and generation spec "
        "(ground truth)");
  }
  int rank = args.rank > 0 ? args.rank : data.generation->rank;
  const auto gen_model = ewad::make_anomaly_model(data.generation->model);
  const std::vector<double> f_star =
      ewad::true_posterior(data.obs, *data.rates, *data.params, *gen_model);
  const std::vector<double> grid = ewad::default_gamma_grid();

  ewad::RocCurve curve;
  if (args.method == "oracle") {
    curve = ewad::sweep_roc(
        [&](double gamma) {
          return ewad::solve_oracle(f_star, data.obs, gamma).t;
        },
        f_star, grid);
  } else if (args.method == "ew") {
    ewad::DetectorConfig config;
    config.rank = rank;
    config.gamma = grid.front();
    config.band_mode = parse_band(args.band);
    config.anomaly_model = args.working_model;
    config.seed = g.seed;
    ewad::DetectionResult det = ewad::run_ew(data.obs, config);
    curve = ewad::sweep_roc(
        [&](double gamma) {
          return ewad::solve_pew(det.band, data.obs, gamma).t;
        },
        f_star, grid);
  } else {
    // Baseline curves are computed by the same scoring used in the bench.
    ewad::Instance inst;
    inst.spec = *data.generation;
    inst.rates = *data.rates;
    inst.obs = data.obs;
    if (data.mask) inst.mask = *data.mask;
    inst.params = *data.params;
    ewad::BenchOptions options;
    options.grid = grid;
    options.working_model = args.working_model;
    options.pcp_ratio = args.ratio;
    options.rmc_cap_scale = args.cap_scale;
    options.solver = args.solver;
    ewad::BenchRow row = ewad::bench_instance(inst, options);
    double value = 0.0;
    if (args.method == "stable-pcp") {
      value = row.pcp.auc;
    } else if (args.method == "rmc") {
      value = row.rmc.auc;
    } else if (args.method == "drmf") {
      value = row.drmf.auc;
    } else {
      throw ewad::ValidationError("unknown evaluate method: " + args.method);
    }
    fs::create_directories(g.out);
    json report;
    report["method"] = args.method;
    report["auc"] = value;
    write_text(g.out / ("auc_" + args.method + ".json"), report.dump(2) + "\n");
    std::printf("evaluate %s: auc=%.6f -> %s\n", args.method.c_str(), value,
                g.out.string().c_str());
    return;
  }

  fs::create_directories(g.out);
  ewad::write_sweep_csv(g.out / ("roc_" + args.method + ".csv"),
                        to_sweep_rows(curve));
  json report;
  report["method"] = args.method;
  report["auc"] = curve.auc;
  write_text(g.out / ("auc_" + args.method + ".json"), report.dump(2) + "\n");
  std::printf("evaluate %s: auc=%.6f -> %s\n", args.method.c_str(), curve.auc,
              g.out.string().c_str());
}

// --- bench ----------------------------------------------------------------

struct BenchArgs {
  int instances = 100;
  ewad::EnsembleRanges ranges;
  ewad::BenchOptions options;
  bool fast = false;
};

json score_json(const ewad::MethodScore& s) {
  return json{{"auc", s.auc},
              {"frobenius_error", s.frobenius},
              {"max_abs_error", s.max_abs}};
}

void cmd_bench(const GlobalOptions& g, BenchArgs& args) {
  args.options.run_baselines = !args.fast;
  ewad::BenchSummary summary =
      ewad::run_bench(args.instances, args.ranges, g.seed,
                      effective_threads(g), args.options);

  fs::create_directories(g.out);
  json report;
  report["instances"] = args.instances;
  report["seed"] = g.seed;
  report["seconds"] = summary.seconds;
  report["oracle"] = score_json(summary.oracle);
  report["entrywise"] = score_json(summary.ew);
  report["stable_pcp"] = score_json(summary.pcp);
  report["rmc"] = score_json(summary.rmc);
  report["drmf"] = score_json(summary.drmf);
  write_text(g.out / "bench.json", report.dump(2) + "\n");

  std::string csv =
      "# per-instance results\n"
      "index,rank,mean_level,observe_prob,anom_prob,alpha,auc_oracle,auc_ew,"
      "auc_pcp,auc_rmc,auc_drmf,frob_ew,frob_pcp,frob_rmc,frob_drmf,seconds\n";
  for (std::size_t i = 0; i < summary.rows.size(); ++i) {
    const ewad::BenchRow& row = summary.rows[i];
    csv += std::to_string(i) + "," + std::to_string(row.spec.rank) + "," +
           ewad::format_double(row.spec.mean_level) + "," +
           ewad::format_double(row.spec.observe_prob) + "," +
           ewad::format_double(row.spec.anom_prob) + "," +
           ewad::format_double(row.spec.alpha.empty() ? 0.0
                                                      : row.spec.alpha[0]) +
           "," + ewad::format_double(row.oracle.auc) + "," +
           ewad::format_double(row.ew.auc) + "," +
           ewad::format_double(row.pcp.auc) + "," +
           ewad::format_double(row.rmc.auc) + "," +
           ewad::format_double(row.drmf.auc) + "," +
           ewad::format_double(row.ew.frobenius) + "," +
           ewad::format_double(row.pcp.frobenius) + "," +
           ewad::format_double(row.rmc.frobenius) + "," +
           ewad::format_double(row.drmf.frobenius) + "," +
           ewad::format_double(row.seconds) + "\n";
  }
  write_text(g.out / "bench.csv", csv);
  std::fputs(ewad::format_bench_table(summary).c_str(), stdout);
}

// --- lowerbound -------------------------------------------------------------

struct LowerBoundArgs {
  std::vector<int> sizes = {50, 100, 200};
  int seeds = 20;
  double c_star = 0.4;
};

void cmd_lowerbound(const GlobalOptions& g, LowerBoundArgs& args) {
  ewad::LowerBoundSpec base;
  base.c_star = args.c_star;
  std::vector<ewad::RegretPoint> points = ewad::regret_curve(
      args.sizes, base, args.seeds, g.seed, effective_threads(g));

  fs::create_directories(g.out);
  std::string csv = "n,mean_regret,mean_oracle_tpr,mean_detector_tpr\n";
  for (const ewad::RegretPoint& p : points) {
    csv += std::to_string(p.n) + "," + ewad::format_double(p.mean_regret) +
           "," + ewad::format_double(p.mean_oracle_tpr) + "," +
           ewad::format_double(p.mean_detector_tpr) + "\n";
  }
  write_text(g.out / "regret.csv", csv);
  std::printf("%6s %14s %14s %14s\n", "n", "regret", "oracle_tpr",
              "detector_tpr");
  for (const ewad::RegretPoint& p : points) {
    std::printf("%6d %14.6f %14.6f %14.6f\n", p.n, p.mean_regret,
                p.mean_oracle_tpr, p.mean_detector_tpr);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Anomaly detection in partially observed low-rank count matrices"};
  app.set_config("--config");
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads,
                 "Worker threads (0 = EWAD_THREADS env or hardware)")
      ->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  GenerateArgs gen;
  CLI::App* c_gen =
      app.add_subcommand("generate", "Draw a synthetic instance to --out");
  c_gen->add_option("--rows", gen.spec.rows)->capture_default_str();
  c_gen->add_option("--cols", gen.spec.cols)->capture_default_str();
  c_gen->add_option("--rank", gen.spec.rank)->capture_default_str();
  c_gen->add_option("--mean", gen.spec.mean_level, "Grand-mean rate level")
      ->capture_default_str();
  c_gen->add_option("--observe-prob", gen.spec.observe_prob)
      ->capture_default_str();
  c_gen->add_option("--anom-prob", gen.spec.anom_prob)->capture_default_str();
  c_gen->add_option("--alpha", gen.alpha, "Anomaly model parameter")
      ->capture_default_str();
  c_gen->add_option("--model", gen.spec.model,
                    "Anomaly model: poisson-thinned | exp-onset | zero")
      ->capture_default_str();

  DetectArgs det;
  CLI::App* c_det = app.add_subcommand(
      "detect", "Run the entrywise detector on an instance directory");
  c_det->add_option("--instance", det.instance, "Instance directory")
      ->required();
  c_det->add_option("--rank", det.rank, "De-noising rank (0 = from instance)")
      ->capture_default_str();
  c_det->add_option("--gamma", det.config.gamma, "False-positive budget")
      ->capture_default_str();
  c_det->add_option("--band", det.band, "point | theoretical | fixed")
      ->capture_default_str();
  c_det->add_option("--delta", det.config.fixed_delta,
                    "Half-width for --band fixed")
      ->capture_default_str();
  c_det->add_option("--model", det.config.anomaly_model, "Working model")
      ->capture_default_str();
  c_det->add_option("--moments", det.config.moment_count,
                    "Matched moment count (0 = dim + 3)")
      ->capture_default_str();
  c_det->add_option("--p-hi", det.config.theta_domain.p_hi,
                    "Upper bound of the p_anom search box")
      ->capture_default_str();
  c_det->add_option("--observe-prob", det.observe_prob,
                    "Known observation probability (<0 = empirical)")
      ->capture_default_str();
  c_det->add_option("--kappa", det.constants.condition_number)
      ->capture_default_str();
  c_det->add_option("--mu", det.constants.incoherence)->capture_default_str();
  c_det->add_option("--rate-bound", det.constants.rate_bound)
      ->capture_default_str();
  c_det->add_option("--lipschitz", det.constants.lipschitz)
      ->capture_default_str();
  c_det->add_option("--c1", det.constants.band_constant)
      ->capture_default_str();

  BaselineArgs base;
  CLI::App* c_base = app.add_subcommand(
      "baseline", "Run a decomposition baseline on an instance directory");
  c_base->add_option("--instance", base.instance, "Instance directory")
      ->required();
  c_base->add_option("--method", base.method,
                     "soft-impute | stable-pcp | rmc | drmf")
      ->capture_default_str();
  c_base->add_option("--lambda", base.lambda,
                     "Penalty (0 = tune to the instance rank)")
      ->capture_default_str();
  c_base->add_option("--ratio", base.ratio, "lambda / mu ratio for stable-pcp")
      ->capture_default_str();
  c_base->add_option("--cap", base.cap, "Entrywise cap (rmc)")
      ->capture_default_str();
  c_base->add_option("--rank", base.rank, "Target rank (0 = from instance)")
      ->capture_default_str();
  c_base->add_option("--budget", base.budget, "DRMF anomaly budget fraction")
      ->capture_default_str();
  c_base->add_option("--max-iter", base.solver.max_iter)
      ->capture_default_str();
  c_base->add_option("--tol", base.solver.tol)->capture_default_str();

  EvaluateArgs ev;
  CLI::App* c_ev = app.add_subcommand(
      "evaluate", "Sweep an ROC curve for a method on a ground-truth instance");
  c_ev->add_option("--instance", ev.instance, "Instance directory")
      ->required();
  c_ev->add_option("--method", ev.method,
                   "ew | oracle | stable-pcp | rmc | drmf")
      ->capture_default_str();
  c_ev->add_option("--working-model", ev.working_model)
      ->capture_default_str();
  c_ev->add_option("--band", ev.band, "Band mode for ew")
      ->capture_default_str();
  c_ev->add_option("--ratio", ev.ratio)->capture_default_str();
  c_ev->add_option("--cap-scale", ev.cap_scale)->capture_default_str();
  c_ev->add_option("--rank", ev.rank, "Detector rank (0 = from instance)")
      ->capture_default_str();

  BenchArgs bench;
  CLI::App* c_bench = app.add_subcommand(
      "bench", "Ensemble benchmark: detector vs baselines vs oracle");
  c_bench->add_option("--instances", bench.instances)->capture_default_str();
  c_bench->add_option("--rows", bench.ranges.rows)->capture_default_str();
  c_bench->add_option("--cols", bench.ranges.cols)->capture_default_str();
  c_bench->add_option("--rank-min", bench.ranges.rank_range.first)
      ->capture_default_str();
  c_bench->add_option("--rank-max", bench.ranges.rank_range.second)
      ->capture_default_str();
  c_bench->add_option("--mean-min", bench.ranges.mean_range.first)
      ->capture_default_str();
  c_bench->add_option("--mean-max", bench.ranges.mean_range.second)
      ->capture_default_str();
  c_bench->add_option("--observe-min", bench.ranges.observe_range.first)
      ->capture_default_str();
  c_bench->add_option("--observe-max", bench.ranges.observe_range.second)
      ->capture_default_str();
  c_bench->add_option("--anom-min", bench.ranges.anom_range.first)
      ->capture_default_str();
  c_bench->add_option("--anom-max", bench.ranges.anom_range.second)
      ->capture_default_str();
  c_bench->add_option("--alpha-min", bench.ranges.alpha_range.first)
      ->capture_default_str();
  c_bench->add_option("--alpha-max", bench.ranges.alpha_range.second)
      ->capture_default_str();
  c_bench->add_option("--gen-model", bench.ranges.model,
                      "Generating anomaly model")
      ->capture_default_str();
  c_bench->add_option("--working-model", bench.options.working_model,
                      "Detector working model")
      ->capture_default_str();
  c_bench->add_option("--p-lo", bench.options.theta_domain.p_lo,
                      "Fit search box: lower p_anom")
      ->capture_default_str();
  c_bench->add_option("--p-hi", bench.options.theta_domain.p_hi,
                      "Fit search box: upper p_anom")
      ->capture_default_str();
  c_bench->add_option("--fit-alpha-lo",
                      bench.options.theta_domain.alpha_box[0].first,
                      "Fit search box: lower alpha")
      ->capture_default_str();
  c_bench->add_option("--fit-alpha-hi",
                      bench.options.theta_domain.alpha_box[0].second,
                      "Fit search box: upper alpha")
      ->capture_default_str();
  c_bench->add_option("--moments", bench.options.moment_count,
                      "Moment count T for the detector fit (0 = default)")
      ->capture_default_str();
  c_bench->add_option("--ratio", bench.options.pcp_ratio)
      ->capture_default_str();
  c_bench->add_flag("--pcp-multi-solve", bench.options.pcp_multi_solve,
                    "Build the stable-pcp curve from re-solves across a "
                    "lambda / mu ratio grid instead of ranking |A_hat|");
  c_bench->add_option("--cap-scale", bench.options.rmc_cap_scale)
      ->capture_default_str();
  c_bench->add_option("--drmf-budget", bench.options.drmf_budget)
      ->capture_default_str();
  c_bench->add_option("--max-iter", bench.options.solver.max_iter)
      ->capture_default_str();
  c_bench->add_flag("--fast", bench.fast,
                    "Skip the decomposition baselines (detector + oracle)");

  LowerBoundArgs lb;
  CLI::App* c_lb = app.add_subcommand(
      "lowerbound", "Regret of the detector on the minimax-hard family");
  c_lb->add_option("--sizes", lb.sizes, "Matrix sizes (even)")
      ->capture_default_str();
  c_lb->add_option("--seeds", lb.seeds, "Instances per size")
      ->capture_default_str();
  c_lb->add_option("--c-star", lb.c_star, "Rate deficit scale")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_gen->parsed()) {
      cmd_generate(g, gen);
    } else if (c_det->parsed()) {
      cmd_detect(g, det);
    } else if (c_base->parsed()) {
      cmd_baseline(g, base);
    } else if (c_ev->parsed()) {
      cmd_evaluate(g, ev);
    } else if (c_bench->parsed()) {
      cmd_bench(g, bench);
    } else if (c_lb->parsed()) {
      cmd_lowerbound(g, lb);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
