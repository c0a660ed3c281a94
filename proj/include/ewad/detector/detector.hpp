#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ewad/completion/completion.hpp"
#include "ewad/core/types.hpp"
#include "ewad/estimator/estimator.hpp"
#include "ewad/models/models.hpp"

namespace ewad {

// Per-entry confidence band around the non-anomaly posterior, aligned with
// obs.entries.  Always 0 <= lower <= point <= upper <= 1; when the mixture
// assigns the observed count probability zero the band degenerates to
// (0, 0, 1).
struct ConfidenceBand {
  std::vector<double> lower;
  std::vector<double> point;
  std::vector<double> upper;
};

// Band half-width by mode: 0 for kPoint, config.fixed_delta for kFixed, and
// for kTheoretical
//   C1 * (K + L)^3 * kappa^4 * mu * r * L^2 * sqrt(log(m) / (p_obs * m))
// with p_obs either known from the config or the empirical fill fraction.
double band_half_width(const SparseObservations& obs,
                       const TheoreticalConstants& constants,
                       const DetectorConfig& config);

ConfidenceBand confidence_band(const SparseObservations& obs,
                               const RateMatrix& m_hat, const ModelParams& theta,
                               const TheoreticalConstants& constants,
                               const DetectorConfig& config,
                               const AnomalyModel& model);

// Selection-probability vector plus bookkeeping from the fractional solve.
struct Selection {
  std::vector<double> t;          // aligned with obs.entries, each in [0, 1]
  double budget = 0.0;            // right-hand side gamma * sum(lower)
  double spent = 0.0;             // sum t_i * upper_i
  double feasibility_slack = 0.0; // budget - spent (>= 0 up to rounding)
};

// Maximize sum(t) subject to sum(t * upper) <= gamma * sum(lower),
// 0 <= t <= 1, solved exactly by the greedy fractional fill in ascending
// `upper` order (ties by (row, col)).  Entries with upper == 0 cost nothing
// and are always fully selected.
Selection solve_pew(const ConfidenceBand& band, const SparseObservations& obs,
                    double gamma);

// The oracle selection: same program with the true posterior f* as both the
// cost and the budget weight.
Selection solve_oracle(std::span<const double> f_star,
                       const SparseObservations& obs, double gamma);

// Bernoulli rounding of the fractional selection into a hard mask.
AnomalyMask sample_mask(std::span<const double> t,
                        const SparseObservations& obs, std::uint64_t seed);

// End-to-end detector: rank-r de-noising, moment-matching fit, confidence
// band, fractional selection at config.gamma, Bernoulli rounding.
struct DetectionResult {
  RateEstimate rates;
  MomentFit fit;
  ConfidenceBand band;
  Selection selection;
  AnomalyMask mask;
};

DetectionResult run_ew(const SparseObservations& obs,
                       const DetectorConfig& config,
                       const TheoreticalConstants& constants = {});

}  // namespace ewad
