#include "ewad/simgen/simgen.hpp"

#include <cmath>
#include <random>

#include "ewad/common/error.hpp"

namespace ewad {

namespace {

std::int64_t draw_poisson(double rate, Rng& rng) {
  if (rate <= 0.0) return 0;
  std::poisson_distribution<std::int64_t> pois(rate);
  return pois(rng);
}

}  // namespace

RateMatrix gen_rate_matrix(int rows, int cols, int rank, double mean_level,
                           Rng& rng) {
  if (rows <= 0 || cols <= 0 || rank < 1 || rank > std::min(rows, cols)) {
    throw ValidationError("gen_rate_matrix: invalid shape or rank");
  }
  if (!(mean_level > 0.0) || !std::isfinite(mean_level)) {
    throw ValidationError("gen_rate_matrix: mean_level must be positive");
  }
  std::gamma_distribution<double> gamma(1.0, 2.0);
  Matrix u(rows, rank);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < rank; ++k) u(i, k) = gamma(rng);
  }
  Matrix v(cols, rank);
  for (int j = 0; j < cols; ++j) {
    for (int k = 0; k < rank; ++k) v(j, k) = gamma(rng);
  }
  RateMatrix out;
  out.values = u * v.transpose();
  double grand_mean = out.values.mean();
  out.values *= mean_level / grand_mean;
  return out;
}

ObservationDraw gen_observation(const RateMatrix& rates, double observe_prob,
                                double anom_prob,
                                std::span<const double> alpha,
                                const AnomalyModel& model, Rng& rng) {
  validate_rate_matrix(rates);
  if (observe_prob < 0.0 || observe_prob > 1.0) {
    throw ValidationError("gen_observation: observe_prob out of range");
  }
  if (anom_prob < 0.0 || anom_prob > kMaxAnomalyProbability) {
    throw ValidationError("gen_observation: anom_prob out of range");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ObservationDraw draw;
  draw.obs.rows = rates.rows();
  draw.obs.cols = rates.cols();
  draw.mask.rows = rates.rows();
  draw.mask.cols = rates.cols();
  for (int i = 0; i < rates.rows(); ++i) {
    for (int j = 0; j < rates.cols(); ++j) {
      if (unit(rng) >= observe_prob) continue;
      Entry entry;
      entry.row = i;
      entry.col = j;
      if (unit(rng) < anom_prob) {
        entry.count = model.sample(alpha, rates.values(i, j), rng);
        draw.mask.cells.emplace_back(i, j);
      } else {
        entry.count = draw_poisson(rates.values(i, j), rng);
      }
      draw.obs.entries.push_back(entry);
    }
  }
  draw.mask.canonicalize();
  return draw;
}

Instance gen_instance(const GenerationSpec& spec) {
  validate_generation_spec(spec);
  Rng rng = make_rng(spec.seed);
  Instance inst;
  inst.spec = spec;
  auto model = make_anomaly_model(spec.model);
  inst.rates =
      gen_rate_matrix(spec.rows, spec.cols, spec.rank, spec.mean_level, rng);
  ObservationDraw draw = gen_observation(
      inst.rates, spec.observe_prob, spec.anom_prob, spec.alpha, *model, rng);
  inst.obs = std::move(draw.obs);
  inst.mask = std::move(draw.mask);
  inst.params.p_anom = spec.anom_prob;
  inst.params.alpha = spec.alpha;
  return inst;
}

Instance gen_ensemble_member(const EnsembleRanges& ranges,
                             std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> rank_dist(ranges.rank_range.first,
                                               ranges.rank_range.second);
  std::uniform_real_distribution<double> mean_dist(ranges.mean_range.first,
                                                   ranges.mean_range.second);
  std::uniform_real_distribution<double> obs_dist(ranges.observe_range.first,
                                                  ranges.observe_range.second);
  std::uniform_real_distribution<double> anom_dist(ranges.anom_range.first,
                                                   ranges.anom_range.second);
  std::uniform_real_distribution<double> alpha_dist(ranges.alpha_range.first,
                                                    ranges.alpha_range.second);
  Instance inst;
  inst.spec.rows = ranges.rows;
  inst.spec.cols = ranges.cols;
  inst.spec.rank = rank_dist(rng);
  inst.spec.mean_level = mean_dist(rng);
  inst.spec.observe_prob = obs_dist(rng);
  inst.spec.anom_prob = anom_dist(rng);
  inst.spec.alpha = {alpha_dist(rng)};
  inst.spec.model = ranges.model;
  inst.spec.seed = seed;
  validate_generation_spec(inst.spec);

  auto model = make_anomaly_model(inst.spec.model);
  inst.rates = gen_rate_matrix(inst.spec.rows, inst.spec.cols, inst.spec.rank,
                               inst.spec.mean_level, rng);
  ObservationDraw draw =
      gen_observation(inst.rates, inst.spec.observe_prob, inst.spec.anom_prob,
                      inst.spec.alpha, *model, rng);
  inst.obs = std::move(draw.obs);
  inst.mask = std::move(draw.mask);
  inst.params.p_anom = inst.spec.anom_prob;
  inst.params.alpha = inst.spec.alpha;
  return inst;
}

std::vector<Instance> gen_ensemble(int count, const EnsembleRanges& ranges,
                                   std::uint64_t master_seed) {
  if (count < 1) throw ValidationError("gen_ensemble: count must be >= 1");
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(gen_ensemble_member(
        ranges, derive_seed(master_seed, static_cast<std::uint64_t>(i))));
  }
  return out;
}

ObservationDraw thin_perturb(const RateMatrix& base,
                             const SparseObservations& pattern,
                             double anom_prob, double alpha, Rng& rng) {
  validate_rate_matrix(base);
  validate_observations(pattern);
  if (base.rows() != pattern.rows || base.cols() != pattern.cols) {
    throw ValidationError("thin_perturb: pattern shape differs from base");
  }
  if (anom_prob < 0.0 || anom_prob > kMaxAnomalyProbability) {
    throw ValidationError("thin_perturb: anom_prob out of range");
  }
  if (alpha < 0.0 || alpha > 1.0) {
    throw ValidationError("thin_perturb: alpha must lie in [0, 1]");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ObservationDraw draw;
  draw.obs.rows = pattern.rows;
  draw.obs.cols = pattern.cols;
  draw.mask.rows = pattern.rows;
  draw.mask.cols = pattern.cols;
  for (const Entry& cell : pattern.entries) {
    Entry entry;
    entry.row = cell.row;
    entry.col = cell.col;
    entry.count = draw_poisson(base.values(cell.row, cell.col), rng);
    if (unit(rng) < anom_prob) {
      draw.mask.cells.emplace_back(cell.row, cell.col);
      if (alpha == 0.0) {
        entry.count = 0;
      } else if (alpha < 1.0 && entry.count > 0) {
        std::binomial_distribution<std::int64_t> thin(entry.count, alpha);
        entry.count = thin(rng);
      }
    }
    draw.obs.entries.push_back(entry);
  }
  draw.mask.canonicalize();
  return draw;
}

void validate_lowerbound_spec(const LowerBoundSpec& spec) {
  if (spec.n < 2 || spec.n % 2 != 0) {
    throw ValidationError("lowerbound: n must be even and >= 2");
  }
  if (!(spec.c_star > 0.0) || !(spec.c_star < 0.5)) {
    throw ValidationError("lowerbound: c_star must lie in (0, 1/2)");
  }
  if (spec.bits && static_cast<int>(spec.bits->size()) != spec.n / 2) {
    throw ValidationError("lowerbound: bit vector must have length n/2");
  }
}

LowerBoundInstance gen_lowerbound_instance(const LowerBoundSpec& spec,
                                           Rng& rng) {
  validate_lowerbound_spec(spec);
  const int n = spec.n;
  LowerBoundInstance inst;
  if (spec.bits) {
    inst.bits = *spec.bits;
  } else {
    inst.bits.resize(static_cast<std::size_t>(n / 2));
    std::uniform_int_distribution<int> bit(0, 1);
    for (auto& b : inst.bits) b = static_cast<std::uint8_t>(bit(rng));
  }
  const double low = 1.0 - spec.c_star / std::sqrt(static_cast<double>(n));
  inst.rates.values.resize(n, n);
  for (int i = 0; i < n / 2; ++i) {
    double top = inst.bits[static_cast<std::size_t>(i)] == 0 ? 1.0 : low;
    double bottom = inst.bits[static_cast<std::size_t>(i)] == 0 ? low : 1.0;
    inst.rates.values.row(2 * i).setConstant(top);
    inst.rates.values.row(2 * i + 1).setConstant(bottom);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  inst.obs.rows = n;
  inst.obs.cols = n;
  inst.mask.rows = n;
  inst.mask.cols = n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Entry entry;
      entry.row = i;
      entry.col = j;
      if (unit(rng) < LowerBoundSpec::kAnomProb) {
        entry.count = 0;  // anomalous entries report nothing
        inst.mask.cells.emplace_back(i, j);
      } else {
        entry.count = draw_poisson(inst.rates.values(i, j), rng);
      }
      inst.obs.entries.push_back(entry);
    }
  }
  inst.mask.canonicalize();
  inst.params.p_anom = LowerBoundSpec::kAnomProb;
  inst.params.alpha = {};
  return inst;
}

}  // namespace ewad
