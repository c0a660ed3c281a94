#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ewad/common/rng.hpp"
#include "ewad/core/types.hpp"
#include "ewad/models/models.hpp"

namespace ewad {

// Rank-r nonnegative rate matrix k * U V^T with i.i.d. Gamma(1, 2) factor
// entries, scaled so the grand mean is exactly mean_level.
RateMatrix gen_rate_matrix(int rows, int cols, int rank, double mean_level,
                           Rng& rng);

struct ObservationDraw {
  SparseObservations obs;
  AnomalyMask mask;
};

// Observes each cell independently with probability observe_prob; an
// observed cell is anomalous with probability anom_prob, in which case its
// count is drawn from the anomaly model, otherwise Poisson(rate).
ObservationDraw gen_observation(const RateMatrix& rates, double observe_prob,
                                double anom_prob, std::span<const double> alpha,
                                const AnomalyModel& model, Rng& rng);

// Parameter ranges for the synthetic ensemble; defaults are the benchmark
// ensemble (rank 1-10, mean 1-10, observation 0.5-1, anomaly share 0-0.3,
// alpha 0-1, exponential-onset anomalies).
struct EnsembleRanges {
  int rows = 100;
  int cols = 100;
  std::pair<int, int> rank_range = {1, 10};
  std::pair<double, double> mean_range = {1.0, 10.0};
  std::pair<double, double> observe_range = {0.5, 1.0};
  std::pair<double, double> anom_range = {0.0, 0.3};
  std::pair<double, double> alpha_range = {0.0, 1.0};
  std::string model = "exp-onset";
};

struct Instance {
  GenerationSpec spec;
  RateMatrix rates;
  SparseObservations obs;
  AnomalyMask mask;
  ModelParams params;
};

// Realizes one instance from a fully specified generation spec (no parameter
// sampling); deterministic in spec.seed.
Instance gen_instance(const GenerationSpec& spec);

// Draws `count` instances with parameters sampled uniformly from `ranges`.
// Instance i is generated from seed master_seed ^ i, so the ensemble is
// independent of evaluation order (and safely parallel).
std::vector<Instance> gen_ensemble(int count, const EnsembleRanges& ranges,
                                   std::uint64_t master_seed);

// Builds one instance of the ensemble from its own seed (used by gen_ensemble
// and by streaming/parallel drivers).
Instance gen_ensemble_member(const EnsembleRanges& ranges, std::uint64_t seed);

// Semi-synthetic perturbation: treats `base` as the true rates, redraws
// Poisson counts on the given observation pattern, flags each drawn entry
// anomalous with probability anom_prob and thins its count binomially with
// retention alpha.
ObservationDraw thin_perturb(const RateMatrix& base,
                             const SparseObservations& pattern,
                             double anom_prob, double alpha, Rng& rng);

// The minimax-hard family: an n x n rank-1 rate matrix whose row pairs
// (2i, 2i+1) take values (1, 1 - c_star / sqrt(n)) or swapped according to
// bit b_i, observed fully, with anomalies occurring w.p. 1/2 and reporting
// zero counts.
struct LowerBoundSpec {
  int n = 100;
  double c_star = 0.4;
  // Bit vector of length n/2; empty means "draw uniformly".
  std::optional<std::vector<std::uint8_t>> bits;

  static constexpr double kGamma = 0.18393972058572117;  // 1 / (2e)
  static constexpr double kAnomProb = 0.5;
};

void validate_lowerbound_spec(const LowerBoundSpec& spec);

struct LowerBoundInstance {
  RateMatrix rates;
  SparseObservations obs;
  AnomalyMask mask;
  ModelParams params;             // (1/2, {}) for the zero model
  std::vector<std::uint8_t> bits; // the realized b
};

LowerBoundInstance gen_lowerbound_instance(const LowerBoundSpec& spec,
                                           Rng& rng);

}  // namespace ewad
