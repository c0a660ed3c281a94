#include "ewad/models/models.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "ewad/common/error.hpp"

namespace ewad {

namespace {

void check_count(std::int64_t k) {
  if (k < 0) throw ValidationError("poisson: count must be >= 0");
}

void check_rate(double rate) {
  if (!std::isfinite(rate) || rate < 0.0) {
    throw ValidationError("poisson: rate must be >= 0 and finite");
  }
}

// Adaptive Simpson quadrature on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  double fa = f(a);
  double fb = f(b);
  double fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

constexpr double kQuadratureTol = 1e-10;

// log(k!) via a lazily built lgamma table; falls back to std::lgamma for
// counts past the table.
double log_factorial(std::int64_t k) {
  static const std::vector<double> table = [] {
    std::vector<double> t(131072);
    for (std::size_t j = 0; j < t.size(); ++j) {
      t[j] = std::lgamma(static_cast<double>(j) + 1.0);
    }
    return t;
  }();
  if (k < static_cast<std::int64_t>(table.size())) {
    return table[static_cast<std::size_t>(k)];
  }
  return std::lgamma(static_cast<double>(k) + 1.0);
}

inline double log_poisson_pmf(std::int64_t k, double rate, double log_rate) {
  return -rate + static_cast<double>(k) * log_rate - log_factorial(k);
}

// pmf only; one exp per call.
double poisson_pmf(std::int64_t k, double rate) {
  if (rate == 0.0) return (k == 0) ? 1.0 : 0.0;
  return std::exp(log_poisson_pmf(k, rate, std::log(rate)));
}

}  // namespace

PoissonProbability poisson_probability(std::int64_t k, double rate) {
  check_count(k);
  check_rate(rate);
  PoissonProbability out;
  if (rate == 0.0) {
    out.pmf = (k == 0) ? 1.0 : 0.0;
    out.cdf = 1.0;
    return out;
  }
  const double log_rate = std::log(rate);
  double sum = 0.0;
  double term = 0.0;
  for (std::int64_t j = 0; j <= k; ++j) {
    term = std::exp(log_poisson_pmf(j, rate, log_rate));
    sum += term;
  }
  out.pmf = term;
  out.cdf = std::min(sum, 1.0);
  return out;
}

void poisson_cdf_prefix(double rate, int t_max, double* cdf_out) {
  check_rate(rate);
  if (t_max < 0) throw ValidationError("poisson: t_max must be >= 0");
  if (rate == 0.0) {
    for (int t = 0; t <= t_max; ++t) cdf_out[t] = 1.0;
    return;
  }
  double term = std::exp(-rate);
  double sum = term;
  cdf_out[0] = sum;
  for (int t = 1; t <= t_max; ++t) {
    term *= rate / static_cast<double>(t);
    sum += term;
    cdf_out[t] = std::min(sum, 1.0);
  }
}

std::int64_t poisson_k_max(double rate) {
  check_rate(rate);
  return static_cast<std::int64_t>(
      std::ceil(rate + 12.0 * std::sqrt(rate + 1.0) + 20.0));
}

void AnomalyModel::check_args(std::span<const double> alpha,
                              double rate) const {
  if (static_cast<int>(alpha.size()) != param_dim()) {
    std::ostringstream os;
    os << id() << ": alpha has dimension " << alpha.size() << ", expected "
       << param_dim();
    throw ValidationError(os.str());
  }
  check_rate(rate);
}

namespace {

// Counts thinned by an independent Bernoulli(alpha) mark on each unit:
// X ~ Poisson(alpha * rate).
class PoissonThinned final : public AnomalyModel {
 public:
  std::string id() const override { return "poisson-thinned"; }
  int param_dim() const override { return 1; }

  double pmf(std::int64_t k, std::span<const double> alpha,
             double rate) const override {
    check(alpha, rate);
    return poisson_pmf(k, alpha[0] * rate);
  }

  double cdf(std::int64_t k, std::span<const double> alpha,
             double rate) const override {
    check(alpha, rate);
    return poisson_probability(k, alpha[0] * rate).cdf;
  }

  double mean_factor(std::span<const double> alpha) const override {
    check_alpha(alpha);
    return alpha[0];
  }

  std::int64_t sample(std::span<const double> alpha, double rate,
                      Rng& rng) const override {
    check(alpha, rate);
    double lambda = alpha[0] * rate;
    if (lambda == 0.0) return 0;
    std::poisson_distribution<std::int64_t> pois(lambda);
    return pois(rng);
  }

 private:
  void check_alpha(std::span<const double> alpha) const {
    if (alpha.size() != 1 || !std::isfinite(alpha[0]) || alpha[0] < 0.0 ||
        alpha[0] > 1.0) {
      throw ValidationError("poisson-thinned: alpha must lie in [0, 1]");
    }
  }
  void check(std::span<const double> alpha, double rate) const {
    check_alpha(alpha);
    check_args(alpha, rate);
  }
};

// Counts accrue at the base rate only until an exponential onset time
// (mean alpha) capped at the end of the unit interval:
// X | U ~ Poisson(U * rate) with U = min(E, 1), E ~ Exp(mean alpha).
class ExponentialOnset final : public AnomalyModel {
 public:
  std::string id() const override { return "exp-onset"; }
  int param_dim() const override { return 1; }

  double pmf(std::int64_t k, std::span<const double> alpha,
             double rate) const override {
    check(alpha, rate);
    check_count(k);
    double a = alpha[0];
    if (a <= kDegenerateAlpha) return (k == 0) ? 1.0 : 0.0;
    return mix(a, rate, [k](double lambda) { return poisson_pmf(k, lambda); });
  }

  double cdf(std::int64_t k, std::span<const double> alpha,
             double rate) const override {
    check(alpha, rate);
    check_count(k);
    double a = alpha[0];
    if (a <= kDegenerateAlpha) return 1.0;
    return std::min(1.0, mix(a, rate, [k](double lambda) {
                      return poisson_probability(k, lambda).cdf;
                    }));
  }

  double mean_factor(std::span<const double> alpha) const override {
    check_alpha(alpha);
    double a = alpha[0];
    if (a <= kDegenerateAlpha) return 0.0;
    return a * (1.0 - std::exp(-1.0 / a));
  }

  std::int64_t sample(std::span<const double> alpha, double rate,
                      Rng& rng) const override {
    check(alpha, rate);
    double a = alpha[0];
    double u = 0.0;
    if (a > kDegenerateAlpha) {
      std::exponential_distribution<double> onset(1.0 / a);
      u = std::min(onset(rng), 1.0);
    }
    double lambda = u * rate;
    if (lambda == 0.0) return 0;
    std::poisson_distribution<std::int64_t> pois(lambda);
    return pois(rng);
  }

 private:
  // Below this the onset is numerically immediate and the count is 0 a.s.
  static constexpr double kDegenerateAlpha = 1e-12;

  void check_alpha(std::span<const double> alpha) const {
    if (alpha.size() != 1 || !std::isfinite(alpha[0]) || alpha[0] < 0.0 ||
        alpha[0] > 1.0) {
      throw ValidationError("exp-onset: alpha must lie in [0, 1]");
    }
  }
  void check(std::span<const double> alpha, double rate) const {
    check_alpha(alpha);
    check_args(alpha, rate);
  }

  // E[h(U * rate)] for U = min(E, 1): density part on (0, 1) plus the
  // atom of mass exp(-1/alpha) at U = 1.
  template <typename H>
  double mix(double a, double rate, H&& h) const {
    double inv_a = 1.0 / a;
    auto integrand = [&](double u) {
      return h(u * rate) * inv_a * std::exp(-u * inv_a);
    };
    double density_part = integrate(integrand, 0.0, 1.0, kQuadratureTol);
    double atom = std::exp(-inv_a) * h(rate);
    return density_part + atom;
  }
};

// Anomalous entries report nothing: X = 0 almost surely, g = 0.
class PointMassZero final : public AnomalyModel {
 public:
  std::string id() const override { return "zero"; }
  int param_dim() const override { return 0; }

  double pmf(std::int64_t k, std::span<const double> alpha,
             double rate) const override {
    check_args(alpha, rate);
    check_count(k);
    return (k == 0) ? 1.0 : 0.0;
  }

  double cdf(std::int64_t k, std::span<const double> alpha,
             double rate) const override {
    check_args(alpha, rate);
    check_count(k);
    return 1.0;
  }

  double mean_factor(std::span<const double> alpha) const override {
    if (!alpha.empty()) {
      throw ValidationError("zero: alpha must be empty");
    }
    return 0.0;
  }

  std::int64_t sample(std::span<const double> alpha, double rate,
                      Rng&) const override {
    check_args(alpha, rate);
    return 0;
  }
};

}  // namespace

std::unique_ptr<AnomalyModel> make_anomaly_model(std::string_view id) {
  if (id == "poisson-thinned") return std::make_unique<PoissonThinned>();
  if (id == "exp-onset") return std::make_unique<ExponentialOnset>();
  if (id == "zero") return std::make_unique<PointMassZero>();
  throw ValidationError("unknown anomaly model '" + std::string(id) + "'");
}

PosteriorComponents posterior_nonanomaly(std::int64_t k, double rate,
                                         const ModelParams& params,
                                         const AnomalyModel& model) {
  validate_params(params, model.param_dim());
  PosteriorComponents out;
  out.x = params.p_anom * model.pmf(k, params.alpha, rate);
  out.y = (1.0 - params.p_anom) * poisson_pmf(k, rate);
  double denom = out.x + out.y;
  out.f = (denom == 0.0) ? 0.0 : out.y / denom;
  return out;
}

}  // namespace ewad
