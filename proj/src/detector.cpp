#include "ewad/detector/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ewad/common/error.hpp"
#include "ewad/common/rng.hpp"

namespace ewad {

namespace {

// Core of solve_pew / solve_oracle: maximize sum(t) over 0 <= t <= 1 with
// sum(t * cost) <= gamma * sum(weight).  Greedy in ascending cost order is
// exact for this knapsack relaxation.  The budget is accumulated in the
// same sorted order as the fill so that weight == cost implies t == 1
// everywhere at gamma == 1, without any rounding slack.
Selection greedy_select(std::span<const double> cost,
                        std::span<const double> weight,
                        const SparseObservations& obs, double gamma) {
  if (!std::isfinite(gamma) || gamma < 0.0 || gamma > 1.0) {
    throw ValidationError("selection: gamma must lie in [0, 1]");
  }
  const std::size_t n = cost.size();
  if (weight.size() != n || obs.entries.size() != n) {
    throw ValidationError("selection: input sizes disagree");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cost[a] != cost[b]) return cost[a] < cost[b];
    const Entry& ea = obs.entries[a];
    const Entry& eb = obs.entries[b];
    if (ea.row != eb.row) return ea.row < eb.row;
    return ea.col < eb.col;
  });

  double weight_sum = 0.0;
  double cost_sum = 0.0;
  for (std::size_t i : order) {
    weight_sum += weight[i];
    cost_sum += cost[i];
  }
  const double budget = gamma * weight_sum;

  Selection sel;
  sel.t.assign(n, 0.0);
  sel.budget = budget;
  if (budget >= cost_sum) {
    // Everything fits (e.g. gamma == 1 with cost == weight); select all.
    std::fill(sel.t.begin(), sel.t.end(), 1.0);
    sel.spent = cost_sum;
    sel.feasibility_slack = budget - cost_sum;
    return sel;
  }
  double spent = 0.0;
  for (std::size_t i : order) {
    double c = cost[i];
    if (c <= 0.0) {
      sel.t[i] = 1.0;
      continue;
    }
    double remaining = budget - spent;
    if (remaining <= 0.0) break;
    if (c <= remaining) {
      sel.t[i] = 1.0;
      spent += c;
    } else {
      sel.t[i] = remaining / c;
      spent = budget;
      break;
    }
  }
  sel.spent = spent;
  sel.feasibility_slack = budget - spent;
  return sel;
}

}  // namespace

double band_half_width(const SparseObservations& obs,
                       const TheoreticalConstants& constants,
                       const DetectorConfig& config) {
  switch (config.band_mode) {
    case BandMode::kPoint:
      return 0.0;
    case BandMode::kFixed:
      return config.fixed_delta;
    case BandMode::kTheoretical: {
      validate_constants(constants);
      double p_obs =
          config.observe_prob ? *config.observe_prob : obs.fill_fraction();
      if (!(p_obs > 0.0)) {
        throw ValidationError("band: observation probability must be "
                              "positive");
      }
      double k = constants.lipschitz;
      double l = constants.rate_bound;
      double kappa = constants.condition_number;
      double mu = constants.incoherence;
      double m = static_cast<double>(obs.cols);
      double base = std::pow(k + l, 3) * std::pow(kappa, 4) * mu *
                    static_cast<double>(config.rank) * l * l *
                    std::sqrt(std::log(m) / (p_obs * m));
      return constants.band_constant * base;
    }
  }
  throw ValidationError("band: unknown band mode");
}

ConfidenceBand confidence_band(const SparseObservations& obs,
                               const RateMatrix& m_hat,
                               const ModelParams& theta,
                               const TheoreticalConstants& constants,
                               const DetectorConfig& config,
                               const AnomalyModel& model) {
  validate_observations(obs);
  validate_rate_matrix(m_hat);
  validate_params(theta, model.param_dim());
  if (m_hat.rows() != obs.rows || m_hat.cols() != obs.cols) {
    throw ValidationError("band: rate estimate shape differs from "
                          "observations");
  }
  const double half_width = band_half_width(obs, constants, config);
  const double e = scale_e(theta, model);
  ConfidenceBand band;
  band.lower.reserve(obs.entries.size());
  band.point.reserve(obs.entries.size());
  band.upper.reserve(obs.entries.size());
  for (const Entry& entry : obs.entries) {
    double rate = std::max(m_hat.values(entry.row, entry.col), kRateFloor) / e;
    PosteriorComponents post =
        posterior_nonanomaly(entry.count, rate, theta, model);
    double denom = post.x + post.y;
    if (denom == 0.0) {
      band.lower.push_back(0.0);
      band.point.push_back(0.0);
      band.upper.push_back(1.0);
      continue;
    }
    band.point.push_back(post.f);
    band.lower.push_back(std::clamp((post.y - half_width) / denom, 0.0, 1.0));
    band.upper.push_back(std::clamp((post.y + half_width) / denom, 0.0, 1.0));
  }
  return band;
}

Selection solve_pew(const ConfidenceBand& band, const SparseObservations& obs,
                    double gamma) {
  if (band.lower.size() != band.upper.size() ||
      band.lower.size() != obs.entries.size()) {
    throw ValidationError("solve_pew: band size differs from observations");
  }
  return greedy_select(band.upper, band.lower, obs, gamma);
}

Selection solve_oracle(std::span<const double> f_star,
                       const SparseObservations& obs, double gamma) {
  for (double f : f_star) {
    if (!std::isfinite(f) || f < 0.0 || f > 1.0) {
      throw ValidationError("solve_oracle: f* values must lie in [0, 1]");
    }
  }
  return greedy_select(f_star, f_star, obs, gamma);
}

AnomalyMask sample_mask(std::span<const double> t,
                        const SparseObservations& obs, std::uint64_t seed) {
  if (t.size() != obs.entries.size()) {
    throw ValidationError("sample_mask: size differs from observations");
  }
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AnomalyMask mask;
  mask.rows = obs.rows;
  mask.cols = obs.cols;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || t[i] < 0.0 || t[i] > 1.0) {
      throw ValidationError("sample_mask: t values must lie in [0, 1]");
    }
    // u in [0, 1): t == 0 never selects, t == 1 always does.
    if (unit(rng) < t[i]) {
      mask.cells.emplace_back(obs.entries[i].row, obs.entries[i].col);
    }
  }
  mask.canonicalize();
  return mask;
}

DetectionResult run_ew(const SparseObservations& obs,
                       const DetectorConfig& config,
                       const TheoreticalConstants& constants) {
  validate_config(config);
  validate_observations(obs);
  auto model = make_anomaly_model(config.anomaly_model);
  DetectionResult result;
  SvdOptions svd_options;
  svd_options.seed = config.seed;
  result.rates = estimate_rates(obs, config.rank, svd_options);
  result.fit = fit_theta(obs, result.rates.clipped, config, *model);
  result.band = confidence_band(obs, result.rates.clipped,
                                result.fit.theta_hat, constants, config,
                                *model);
  result.selection = solve_pew(result.band, obs, config.gamma);
  result.mask =
      sample_mask(result.selection.t, obs, derive_seed(config.seed, 0x6d61736bULL));
  return result;
}

}  // namespace ewad
