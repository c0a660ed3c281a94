#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ewad/core/types.hpp"
#include "ewad/models/models.hpp"

namespace ewad {

// Mixture mean scale e(theta) = p_anom * g(alpha) + (1 - p_anom):
// the expected count of an observed entry is e(theta) times its base rate.
double scale_e(const ModelParams& params, const AnomalyModel& model);

// Expected fraction of entries with count <= t under the mixture with base
// rates `rates`:  mean_ij [ p * F_anom(t | alpha, rate_ij)
//                           + (1 - p) * F_pois(t | rate_ij) ].
double model_cdf_fraction(const ModelParams& params, const RateMatrix& rates,
                          std::int64_t t, const AnomalyModel& model);

// Observed fraction of entries with count <= t.
double empirical_cdf_fraction(const SparseObservations& obs, std::int64_t t);

// Sum over t = 0..T-1 of (model fraction at rates m_hat / e(theta) minus
// empirical[t]) squared, where T = empirical.size().  This is the
// moment-matching objective minimized by fit_theta.
double moment_objective(const std::vector<double>& empirical,
                        const RateMatrix& m_hat, const ModelParams& params,
                        const AnomalyModel& model);

struct MomentFit {
  ModelParams theta_hat;
  double objective_value = 0.0;
  bool converged = false;
  // Every evaluated candidate with its objective, in evaluation order
  // (coarse grid first, then the simplex refinement).
  std::vector<std::pair<ModelParams, double>> trace;
};

// Moment-matching estimate of theta = (p_anom, alpha) on the search box
// config.theta_domain: a 21-point-per-dimension grid scan followed by
// Nelder-Mead from the best grid point (tolerance 1e-6, at most 500
// refinement evaluations).  Matches config.moment_count moments (default
// d + 3).  When rows * cols > 10^6 the model-side average runs over a
// seeded subsample of 10^6 cells (seed derived from config.seed).
MomentFit fit_theta(const SparseObservations& obs, const RateMatrix& m_hat,
                    const DetectorConfig& config, const AnomalyModel& model);

}  // namespace ewad
