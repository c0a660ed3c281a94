#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ewad/common/rng.hpp"
#include "ewad/core/types.hpp"

namespace ewad {

// Poisson point probability and lower tail.  Computed in log space
// throughout so counts up to ~1e4 neither overflow nor lose the tail;
// cdf is the running sum of the same pmf terms (internally consistent).
struct PoissonProbability {
  double pmf = 0.0;
  double cdf = 0.0;
};
PoissonProbability poisson_probability(std::int64_t k, double rate);

// cdf_out[t] = P(X <= t) for t = 0..t_max under Poisson(rate).
// Same log-space recurrence as poisson_probability, evaluated once.
void poisson_cdf_prefix(double rate, int t_max, double* cdf_out);

// Truncation point beyond which the Poisson(rate) tail is below 1e-6
// for every rate bounded by `rate`.
std::int64_t poisson_k_max(double rate);

// Distribution of an anomalous count given the anomaly parameter vector
// alpha and the entry's base rate.  Implementations must keep
// pmf/cdf/mean_factor/sample mutually consistent.
class AnomalyModel {
 public:
  virtual ~AnomalyModel() = default;

  virtual std::string id() const = 0;
  // Dimension d of the alpha vector.
  virtual int param_dim() const = 0;
  virtual double pmf(std::int64_t k, std::span<const double> alpha,
                     double rate) const = 0;
  virtual double cdf(std::int64_t k, std::span<const double> alpha,
                     double rate) const = 0;
  // g(alpha): mean of an anomalous count divided by the base rate.
  virtual double mean_factor(std::span<const double> alpha) const = 0;
  virtual std::int64_t sample(std::span<const double> alpha, double rate,
                              Rng& rng) const = 0;

 protected:
  void check_args(std::span<const double> alpha, double rate) const;
};

// Registered model ids: "poisson-thinned", "exp-onset", "zero".
// Throws ValidationError for unknown ids.
std::unique_ptr<AnomalyModel> make_anomaly_model(std::string_view id);

// Posterior decomposition at one observed count k:
//   x = p_anom       * P(k | anomalous)
//   y = (1 - p_anom) * P(k | Poisson(rate))
//   f = y / (x + y), the non-anomaly posterior (0 when x + y == 0).
struct PosteriorComponents {
  double x = 0.0;
  double y = 0.0;
  double f = 0.0;
};
PosteriorComponents posterior_nonanomaly(std::int64_t k, double rate,
                                         const ModelParams& params,
                                         const AnomalyModel& model);

}  // namespace ewad
