#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ewad/core/types.hpp"
#include "ewad/models/models.hpp"
#include "ewad/simgen/simgen.hpp"

namespace ewad {

// Weighted detection rates against the true non-anomaly posterior f*:
//   TPR = sum t (1 - f*) / sum (1 - f*),  FPR = sum t f* / sum f*.
// A zero denominator yields rate 0.
struct DetectionRates {
  double tpr = 0.0;
  double fpr = 0.0;
};
DetectionRates tpr_fpr(std::span<const double> t,
                       std::span<const double> f_star);

// True posterior f* per observed entry under the generating model.
std::vector<double> true_posterior(const SparseObservations& obs,
                                   const RateMatrix& truth,
                                   const ModelParams& params,
                                   const AnomalyModel& model);

struct RocPoint {
  double param = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // sorted by (fpr, tpr) non-decreasing
  double auc = 0.0;
};

// Trapezoidal area under (fpr, tpr) points; input must be sorted by fpr.
double auc(const std::vector<std::pair<double, double>>& points);

// Default benchmark grid: 33 log-spaced budgets in [1e-3, 1].
std::vector<double> default_gamma_grid();

// Evaluates `policy` (param -> per-entry selection probabilities aligned
// with f_star) on each grid value, closes the curve with (0,0) and (1,1),
// sorts by FPR, and integrates.
RocCurve sweep_roc(const std::function<std::vector<double>(double)>& policy,
                   std::span<const double> f_star,
                   std::span<const double> grid);

// Mean TPR regret of the end-to-end detector against the oracle policy on
// the minimax-hard family, per size.  Each (size, seed) pair generates one
// instance with a fresh random bit vector.
struct RegretPoint {
  int n = 0;
  double mean_regret = 0.0;
  double mean_oracle_tpr = 0.0;
  double mean_detector_tpr = 0.0;
};

std::vector<RegretPoint> regret_curve(std::span<const int> sizes,
                                      const LowerBoundSpec& base,
                                      int seeds, std::uint64_t master_seed,
                                      int threads = 1);

}  // namespace ewad
