#include "ewad/estimator/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ewad/common/error.hpp"
#include "ewad/common/rng.hpp"
#include "ewad/estimator/nelder_mead.hpp"

namespace ewad {

namespace {

constexpr double kMinScale = 1e-6;
constexpr std::size_t kSubsampleThreshold = 1000000;
constexpr int kGridPointsPerDim = 21;

// Mean mixture lower-tail fractions at t = 0..T-1 over the given base rates,
// each multiplied by inv_scale.  Fast closed forms for the bundled models;
// the generic branch calls the model's cdf directly.
void mixture_fractions(const std::vector<double>& rates, double inv_scale,
                       const ModelParams& params, const AnomalyModel& model,
                       int t_count, double* out) {
  const double p = params.p_anom;
  const double q = 1.0 - p;
  const int t_max = t_count - 1;
  std::vector<double> acc(static_cast<std::size_t>(t_count), 0.0);
  std::vector<double> pois(static_cast<std::size_t>(t_count), 0.0);
  std::vector<double> anom(static_cast<std::size_t>(t_count), 0.0);
  const std::string model_id = model.id();
  if (model_id == "poisson-thinned") {
    const double alpha = params.alpha[0];
    for (double r : rates) {
      double lam = r * inv_scale;
      poisson_cdf_prefix(lam, t_max, pois.data());
      poisson_cdf_prefix(alpha * lam, t_max, anom.data());
      for (int t = 0; t < t_count; ++t) acc[t] += q * pois[t] + p * anom[t];
    }
  } else if (model_id == "zero") {
    for (double r : rates) {
      poisson_cdf_prefix(r * inv_scale, t_max, pois.data());
      for (int t = 0; t < t_count; ++t) acc[t] += q * pois[t] + p;
    }
  } else {
    for (double r : rates) {
      double lam = r * inv_scale;
      poisson_cdf_prefix(lam, t_max, pois.data());
      for (int t = 0; t < t_count; ++t) {
        acc[t] += q * pois[t] + p * model.cdf(t, params.alpha, lam);
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(rates.size());
  for (int t = 0; t < t_count; ++t) out[t] = acc[t] * inv_n;
}

std::vector<double> flatten(const Matrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(m(i, j));
  }
  return out;
}

double objective_on_rates(const std::vector<double>& rates,
                          const std::vector<double>& empirical,
                          const ModelParams& params,
                          const AnomalyModel& model) {
  double e = scale_e(params, model);
  if (e < kMinScale) return std::numeric_limits<double>::infinity();
  const int t_count = static_cast<int>(empirical.size());
  std::vector<double> fracs(empirical.size(), 0.0);
  mixture_fractions(rates, 1.0 / e, params, model, t_count, fracs.data());
  double obj = 0.0;
  for (int t = 0; t < t_count; ++t) {
    double d = fracs[t] - empirical[t];
    obj += d * d;
  }
  return obj;
}

}  // namespace

double scale_e(const ModelParams& params, const AnomalyModel& model) {
  validate_params(params, model.param_dim());
  double e = params.p_anom * model.mean_factor(params.alpha) +
             (1.0 - params.p_anom);
  if (!(e > 0.0)) {
    throw ValidationError("scale_e: mixture scale must be positive");
  }
  return e;
}

double model_cdf_fraction(const ModelParams& params, const RateMatrix& rates,
                          std::int64_t t, const AnomalyModel& model) {
  validate_params(params, model.param_dim());
  validate_rate_matrix(rates);
  if (t < 0) return 0.0;
  if (t > 100000) {
    throw ValidationError("model_cdf_fraction: t too large");
  }
  std::vector<double> flat = flatten(rates.values);
  std::vector<double> all(static_cast<std::size_t>(t) + 1, 0.0);
  mixture_fractions(flat, 1.0, params, model, static_cast<int>(t) + 1,
                    all.data());
  return all.back();
}

double empirical_cdf_fraction(const SparseObservations& obs, std::int64_t t) {
  validate_observations(obs);
  if (obs.entries.empty()) {
    throw ValidationError("empirical_cdf_fraction: no observed entries");
  }
  if (t < 0) return 0.0;
  std::size_t hits = 0;
  for (const Entry& e : obs.entries) {
    if (e.count <= t) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(obs.entries.size());
}

double moment_objective(const std::vector<double>& empirical,
                        const RateMatrix& m_hat, const ModelParams& params,
                        const AnomalyModel& model) {
  validate_params(params, model.param_dim());
  validate_rate_matrix(m_hat);
  if (empirical.empty()) {
    throw ValidationError("moment_objective: need at least one moment");
  }
  std::vector<double> flat = flatten(m_hat.values);
  return objective_on_rates(flat, empirical, params, model);
}

MomentFit fit_theta(const SparseObservations& obs, const RateMatrix& m_hat,
                    const DetectorConfig& config, const AnomalyModel& model) {
  validate_config(config);
  validate_observations(obs);
  validate_rate_matrix(m_hat);
  if (m_hat.rows() != obs.rows || m_hat.cols() != obs.cols) {
    throw ValidationError("fit_theta: rate estimate shape differs from "
                          "observations");
  }
  if (obs.entries.empty()) {
    throw ValidationError("fit_theta: no observed entries");
  }
  const int dim = model.param_dim();
  const ThetaDomain& domain = config.theta_domain;
  if (dim > 0 && static_cast<int>(domain.alpha_box.size()) != dim) {
    throw ValidationError("fit_theta: alpha search box dimension mismatch");
  }
  const int t_count =
      config.moment_count > 0 ? config.moment_count : dim + 3;

  std::vector<double> empirical(static_cast<std::size_t>(t_count));
  for (int t = 0; t < t_count; ++t) {
    empirical[static_cast<std::size_t>(t)] = empirical_cdf_fraction(obs, t);
  }

  // Model-side average runs over every cell, or a seeded uniform subsample
  // when the matrix is too large for per-candidate full passes.
  std::vector<double> rates;
  std::size_t total = static_cast<std::size_t>(m_hat.rows()) *
                      static_cast<std::size_t>(m_hat.cols());
  if (total > kSubsampleThreshold) {
    Rng rng = make_rng(derive_seed(config.seed, 0x6d6f6d656eULL));
    std::uniform_int_distribution<int> row_dist(0, m_hat.rows() - 1);
    std::uniform_int_distribution<int> col_dist(0, m_hat.cols() - 1);
    rates.reserve(kSubsampleThreshold);
    for (std::size_t i = 0; i < kSubsampleThreshold; ++i) {
      rates.push_back(m_hat.values(row_dist(rng), col_dist(rng)));
    }
  } else {
    rates = flatten(m_hat.values);
  }

  MomentFit fit;
  auto to_params = [&](const std::vector<double>& x) {
    ModelParams p;
    p.p_anom = x[0];
    p.alpha.assign(x.begin() + 1, x.end());
    return p;
  };
  auto objective = [&](const std::vector<double>& x) {
    ModelParams p = to_params(x);
    double val = objective_on_rates(rates, empirical, p, model);
    fit.trace.emplace_back(std::move(p), val);
    return val;
  };

  std::vector<double> lo{domain.p_lo};
  std::vector<double> hi{domain.p_hi};
  for (int i = 0; i < dim; ++i) {
    lo.push_back(domain.alpha_box[static_cast<std::size_t>(i)].first);
    hi.push_back(domain.alpha_box[static_cast<std::size_t>(i)].second);
  }

  // Coarse grid: 21 points per free dimension (fixed dimensions stay put).
  std::vector<std::vector<double>> axes;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    std::vector<double> axis;
    if (hi[i] > lo[i]) {
      for (int g = 0; g < kGridPointsPerDim; ++g) {
        axis.push_back(lo[i] + (hi[i] - lo[i]) * g /
                                   double(kGridPointsPerDim - 1));
      }
    } else {
      axis.push_back(lo[i]);
    }
    axes.push_back(std::move(axis));
  }
  std::vector<double> best_x(lo.size(), 0.0);
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(axes.size(), 0);
  for (;;) {
    std::vector<double> x(axes.size());
    for (std::size_t i = 0; i < axes.size(); ++i) x[i] = axes[i][idx[i]];
    double val = objective(x);
    if (val < best_val) {
      best_val = val;
      best_x = x;
    }
    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] == axes[pos].size()) {
      idx[pos] = 0;
      ++pos;
    }
    if (pos == idx.size()) break;
  }

  NelderMeadOptions nm;
  nm.tol = 1e-6;
  nm.max_evals = 500;
  // Half the grid spacing, as a fraction of the box width.
  nm.initial_step = 0.5 / double(kGridPointsPerDim - 1);
  NelderMeadResult refined = nelder_mead(objective, best_x, lo, hi, nm);
  if (refined.value <= best_val) {
    best_val = refined.value;
    best_x = refined.x;
  }

  fit.theta_hat = to_params(best_x);
  fit.objective_value = best_val;
  fit.converged = refined.converged;
  return fit;
}

}  // namespace ewad
