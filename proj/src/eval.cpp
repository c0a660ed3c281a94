#include "ewad/eval/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ewad/common/error.hpp"
#include "ewad/common/parallel.hpp"
#include "ewad/detector/detector.hpp"

namespace ewad {

DetectionRates tpr_fpr(std::span<const double> t,
                       std::span<const double> f_star) {
  if (t.size() != f_star.size()) {
    throw ValidationError("tpr_fpr: size mismatch");
  }
  double num_tpr = 0.0, den_tpr = 0.0, num_fpr = 0.0, den_fpr = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    num_tpr += t[i] * (1.0 - f_star[i]);
    den_tpr += 1.0 - f_star[i];
    num_fpr += t[i] * f_star[i];
    den_fpr += f_star[i];
  }
  DetectionRates rates;
  rates.tpr = den_tpr > 0.0 ? num_tpr / den_tpr : 0.0;
  rates.fpr = den_fpr > 0.0 ? num_fpr / den_fpr : 0.0;
  return rates;
}

std::vector<double> true_posterior(const SparseObservations& obs,
                                   const RateMatrix& truth,
                                   const ModelParams& params,
                                   const AnomalyModel& model) {
  validate_instance(obs, &truth, nullptr, &params);
  std::vector<double> f;
  f.reserve(obs.entries.size());
  for (const Entry& e : obs.entries) {
    f.push_back(
        posterior_nonanomaly(e.count, truth.values(e.row, e.col), params, model)
            .f);
  }
  return f;
}

double auc(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) {
    throw ValidationError("auc: need at least two points");
  }
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    double dx = points[i].first - points[i - 1].first;
    if (dx < 0.0) {
      throw ValidationError("auc: points must be sorted by fpr");
    }
    area += dx * 0.5 * (points[i].second + points[i - 1].second);
  }
  return area;
}

std::vector<double> default_gamma_grid() {
  std::vector<double> grid;
  const int count = 33;
  const double lo = std::log(1e-3);
  const double hi = std::log(1.0);
  for (int i = 0; i < count; ++i) {
    grid.push_back(std::exp(lo + (hi - lo) * i / double(count - 1)));
  }
  grid.back() = 1.0;
  return grid;
}

RocCurve sweep_roc(const std::function<std::vector<double>(double)>& policy,
                   std::span<const double> f_star,
                   std::span<const double> grid) {
  if (grid.empty()) {
    throw ValidationError("sweep_roc: grid must be non-empty");
  }
  RocCurve curve;
  for (double param : grid) {
    std::vector<double> t = policy(param);
    DetectionRates rates = tpr_fpr(t, f_star);
    curve.points.push_back({param, rates.fpr, rates.tpr});
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  curve.points.push_back({nan, 0.0, 0.0});
  curve.points.push_back({nan, 1.0, 1.0});
  std::stable_sort(curve.points.begin(), curve.points.end(),
                   [](const RocPoint& a, const RocPoint& b) {
                     if (a.fpr != b.fpr) return a.fpr < b.fpr;
                     return a.tpr < b.tpr;
                   });
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.points.size());
  for (const RocPoint& p : curve.points) pts.emplace_back(p.fpr, p.tpr);
  curve.auc = auc(pts);
  return curve;
}

std::vector<RegretPoint> regret_curve(std::span<const int> sizes,
                                      const LowerBoundSpec& base,
                                      int seeds, std::uint64_t master_seed,
                                      int threads) {
  if (seeds < 1) throw ValidationError("regret_curve: seeds must be >= 1");
  for (int n : sizes) {
    if (n < 2 || n % 2 != 0) {
      throw ValidationError("regret_curve: sizes must be even and >= 2");
    }
  }
  auto zero_model = make_anomaly_model("zero");
  std::vector<RegretPoint> out(sizes.size());
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const int n = sizes[si];
    std::vector<double> regrets(static_cast<std::size_t>(seeds), 0.0);
    std::vector<double> oracle_tprs(static_cast<std::size_t>(seeds), 0.0);
    std::vector<double> det_tprs(static_cast<std::size_t>(seeds), 0.0);
    parallel_for_index(
        static_cast<std::size_t>(seeds), threads, [&](std::size_t s) {
          LowerBoundSpec spec = base;
          spec.n = n;
          spec.bits.reset();  // fresh random b per seed
          std::uint64_t seed = derive_seed(
              master_seed, (static_cast<std::uint64_t>(si) << 32) | s);
          Rng rng = make_rng(seed);
          LowerBoundInstance inst = gen_lowerbound_instance(spec, rng);
          std::vector<double> f_star =
              true_posterior(inst.obs, inst.rates, inst.params, *zero_model);

          Selection oracle =
              solve_oracle(f_star, inst.obs, LowerBoundSpec::kGamma);
          double oracle_tpr = tpr_fpr(oracle.t, f_star).tpr;

          DetectorConfig config;
          config.rank = 1;
          config.gamma = LowerBoundSpec::kGamma;
          config.band_mode = BandMode::kPoint;
          config.anomaly_model = "zero";
          config.theta_domain.p_lo = 0.0;
          config.theta_domain.p_hi = 0.75;
          config.seed = seed;
          config.observe_prob = 1.0;
          DetectionResult det = run_ew(inst.obs, config);
          double det_tpr = tpr_fpr(det.selection.t, f_star).tpr;

          regrets[s] = oracle_tpr - det_tpr;
          oracle_tprs[s] = oracle_tpr;
          det_tprs[s] = det_tpr;
        });
    RegretPoint point;
    point.n = n;
    for (int s = 0; s < seeds; ++s) {
      point.mean_regret += regrets[static_cast<std::size_t>(s)];
      point.mean_oracle_tpr += oracle_tprs[static_cast<std::size_t>(s)];
      point.mean_detector_tpr += det_tprs[static_cast<std::size_t>(s)];
    }
    point.mean_regret /= seeds;
    point.mean_oracle_tpr /= seeds;
    point.mean_detector_tpr /= seeds;
    out[si] = point;
  }
  return out;
}

}  // namespace ewad
