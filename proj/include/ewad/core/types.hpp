#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ewad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// One observed cell of the count matrix.
struct Entry {
  int row = 0;
  int col = 0;
  std::int64_t count = 0;
};

// Partially observed count matrix: the set Omega of observed cells together
// with their counts.  Entry order is preserved as given (files keep their
// order; generators emit row-major order); no (row, col) pair may repeat.
struct SparseObservations {
  int rows = 0;
  int cols = 0;
  std::vector<Entry> entries;

  std::size_t size() const { return entries.size(); }
  double fill_fraction() const {
    if (rows <= 0 || cols <= 0) return 0.0;
    return static_cast<double>(entries.size()) /
           (static_cast<double>(rows) * static_cast<double>(cols));
  }
};

// Dense matrix of nonnegative Poisson rates.
struct RateMatrix {
  Matrix values;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
};

// Set of cells flagged anomalous.  Stored sorted by (row, col), no
// duplicates; set semantics.
struct AnomalyMask {
  int rows = 0;
  int cols = 0;
  std::vector<std::pair<int, int>> cells;

  bool contains(int r, int c) const;
  // Sorts and deduplicates `cells`.
  void canonicalize();
};

// Mixture parameters theta = (p_anom, alpha): probability that an observed
// entry is anomalous, plus the anomaly-model parameter vector.
struct ModelParams {
  double p_anom = 0.0;
  std::vector<double> alpha;
};

// Upper bound on p_anom accepted by validation; the mixture scale
// e(theta) stays bounded away from zero below it.
inline constexpr double kMaxAnomalyProbability = 0.95;

// Floor applied to estimated rates so downstream likelihoods stay defined.
inline constexpr double kRateFloor = 1e-9;

// Problem-dependent constants entering the theoretical band half-width
//   C1 * (K + L)^3 * kappa^4 * mu * r * L^2 * sqrt(log(m) / (p_obs * m)).
struct TheoreticalConstants {
  double condition_number = 1.0;   // kappa
  double incoherence = 1.0;        // mu
  double rate_bound = 1.0;         // L, max entry of the rate matrix
  double lipschitz = 1.0;          // K, pmf Lipschitz constant in theta
  double band_constant = 1.0;      // C1
};

enum class BandMode {
  kPoint,        // half-width 0: bands collapse to the plug-in posterior
  kTheoretical,  // half-width from TheoreticalConstants
  kFixed,        // half-width given directly by DetectorConfig::fixed_delta
};

// Search box for the mixture-parameter fit.
struct ThetaDomain {
  double p_lo = 0.0;
  double p_hi = 0.5;
  std::vector<std::pair<double, double>> alpha_box = {{0.0, 1.0}};
};

struct DetectorConfig {
  int rank = 1;
  double gamma = 0.1;        // false-positive budget in [0, 1]
  int moment_count = 0;      // number of matched moments T; 0 = use d + 3
  BandMode band_mode = BandMode::kPoint;
  double fixed_delta = 0.0;  // half-width when band_mode == kFixed
  ThetaDomain theta_domain;
  std::string anomaly_model = "poisson-thinned";
  std::uint64_t seed = 0;
  // Observation probability if known; otherwise the empirical fill
  // fraction |Omega| / (n m) is used where p_obs is needed.
  std::optional<double> observe_prob;
};

struct GenerationSpec {
  int rows = 100;
  int cols = 100;
  int rank = 3;
  double mean_level = 5.0;
  double observe_prob = 1.0;
  double anom_prob = 0.0;
  std::vector<double> alpha = {0.2};
  std::string model = "exp-onset";
  std::uint64_t seed = 0;
};

// --- Validation ---------------------------------------------------------
// Each check throws ValidationError with a specific message and returns the
// (unchanged) object otherwise, so validation is idempotent.

void validate_observations(const SparseObservations& obs);
void validate_rate_matrix(const RateMatrix& rates);
void validate_mask(const AnomalyMask& mask);
void validate_params(const ModelParams& params, int expected_dim = -1);
void validate_constants(const TheoreticalConstants& constants);
void validate_config(const DetectorConfig& config);
void validate_generation_spec(const GenerationSpec& spec);

// Cross-checks an instance: observation invariants, plus shape agreement
// with the optional ground truth (rates, mask, params).  The mask must only
// flag observed cells.
void validate_instance(const SparseObservations& obs,
                       const RateMatrix* rates = nullptr,
                       const AnomalyMask* mask = nullptr,
                       const ModelParams* params = nullptr);

}  // namespace ewad
