#include "ewad/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ewad/common/error.hpp"

namespace ewad {

bool AnomalyMask::contains(int r, int c) const {
  return std::binary_search(cells.begin(), cells.end(), std::make_pair(r, c));
}

void AnomalyMask::canonicalize() {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
}

namespace {

std::string cell_str(int r, int c) {
  std::ostringstream os;
  os << "(" << r << ", " << c << ")";
  return os.str();
}

void check_dims(int rows, int cols, const char* what) {
  if (rows <= 0 || cols <= 0) {
    std::ostringstream os;
    os << what << ": dimensions must be positive, got " << rows << "x" << cols;
    throw ValidationError(os.str());
  }
}

}  // namespace

void validate_observations(const SparseObservations& obs) {
  check_dims(obs.rows, obs.cols, "observations");
  std::set<std::pair<int, int>> seen;
  for (const Entry& e : obs.entries) {
    if (e.row < 0 || e.row >= obs.rows || e.col < 0 || e.col >= obs.cols) {
      throw ValidationError("observations: cell " + cell_str(e.row, e.col) +
                            " outside matrix bounds");
    }
    if (e.count < 0) {
      throw ValidationError("observations: negative count at " +
                            cell_str(e.row, e.col));
    }
    if (!seen.insert({e.row, e.col}).second) {
      throw ValidationError("observations: duplicate cell " +
                            cell_str(e.row, e.col));
    }
  }
}

void validate_rate_matrix(const RateMatrix& rates) {
  check_dims(rates.rows(), rates.cols(), "rate matrix");
  for (int j = 0; j < rates.cols(); ++j) {
    for (int i = 0; i < rates.rows(); ++i) {
      double v = rates.values(i, j);
      if (!std::isfinite(v)) {
        throw ValidationError("rate matrix: non-finite value at " +
                              cell_str(i, j));
      }
      if (v < 0.0) {
        throw ValidationError("rate matrix: negative rate at " +
                              cell_str(i, j));
      }
    }
  }
}

void validate_mask(const AnomalyMask& mask) {
  check_dims(mask.rows, mask.cols, "mask");
  for (std::size_t i = 0; i < mask.cells.size(); ++i) {
    auto [r, c] = mask.cells[i];
    if (r < 0 || r >= mask.rows || c < 0 || c >= mask.cols) {
      throw ValidationError("mask: cell " + cell_str(r, c) +
                            " outside matrix bounds");
    }
    if (i > 0 && !(mask.cells[i - 1] < mask.cells[i])) {
      throw ValidationError("mask: cells not sorted/unique at position " +
                            std::to_string(i));
    }
  }
}

void validate_params(const ModelParams& params, int expected_dim) {
  if (!std::isfinite(params.p_anom) || params.p_anom < 0.0 ||
      params.p_anom > kMaxAnomalyProbability) {
    std::ostringstream os;
    os << "params: p_anom must lie in [0, " << kMaxAnomalyProbability
       << "], got " << params.p_anom;
    throw ValidationError(os.str());
  }
  if (expected_dim >= 0 &&
      static_cast<int>(params.alpha.size()) != expected_dim) {
    std::ostringstream os;
    os << "params: alpha has dimension " << params.alpha.size()
       << ", model expects " << expected_dim;
    throw ValidationError(os.str());
  }
  for (double a : params.alpha) {
    if (!std::isfinite(a)) {
      throw ValidationError("params: non-finite alpha component");
    }
  }
}

void validate_constants(const TheoreticalConstants& constants) {
  auto positive = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw ValidationError(std::string("constants: ") + name +
                            " must be positive and finite");
    }
  };
  positive(constants.condition_number, "condition_number");
  positive(constants.incoherence, "incoherence");
  positive(constants.rate_bound, "rate_bound");
  positive(constants.lipschitz, "lipschitz");
  positive(constants.band_constant, "band_constant");
}

void validate_config(const DetectorConfig& config) {
  if (config.rank < 1) {
    throw ValidationError("config: rank must be >= 1");
  }
  if (!std::isfinite(config.gamma) || config.gamma < 0.0 ||
      config.gamma > 1.0) {
    throw ValidationError("config: gamma must lie in [0, 1]");
  }
  if (config.moment_count < 0) {
    throw ValidationError("config: moment_count must be >= 0");
  }
  if (config.band_mode == BandMode::kFixed &&
      (!std::isfinite(config.fixed_delta) || config.fixed_delta < 0.0)) {
    throw ValidationError("config: fixed band half-width must be >= 0");
  }
  const ThetaDomain& dom = config.theta_domain;
  if (!(dom.p_lo <= dom.p_hi) || dom.p_lo < 0.0 ||
      dom.p_hi > kMaxAnomalyProbability) {
    throw ValidationError("config: p_anom search range invalid");
  }
  for (auto [lo, hi] : dom.alpha_box) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw ValidationError("config: alpha search box invalid");
    }
  }
  if (config.observe_prob &&
      (*config.observe_prob <= 0.0 || *config.observe_prob > 1.0)) {
    throw ValidationError("config: observe_prob must lie in (0, 1]");
  }
}

void validate_generation_spec(const GenerationSpec& spec) {
  check_dims(spec.rows, spec.cols, "generation spec");
  if (spec.rank < 1 || spec.rank > std::min(spec.rows, spec.cols)) {
    throw ValidationError("generation spec: rank out of range");
  }
  if (!(spec.mean_level > 0.0) || !std::isfinite(spec.mean_level)) {
    throw ValidationError("generation spec: mean_level must be positive");
  }
  if (spec.observe_prob <= 0.0 || spec.observe_prob > 1.0) {
    throw ValidationError("generation spec: observe_prob must lie in (0, 1]");
  }
  if (spec.anom_prob < 0.0 || spec.anom_prob > kMaxAnomalyProbability) {
    throw ValidationError("generation spec: anom_prob out of range");
  }
}

void validate_instance(const SparseObservations& obs, const RateMatrix* rates,
                       const AnomalyMask* mask, const ModelParams* params) {
  validate_observations(obs);
  if (rates != nullptr) {
    validate_rate_matrix(*rates);
    if (rates->rows() != obs.rows || rates->cols() != obs.cols) {
      throw ValidationError("instance: rate matrix shape differs from "
                            "observations");
    }
  }
  if (mask != nullptr) {
    validate_mask(*mask);
    if (mask->rows != obs.rows || mask->cols != obs.cols) {
      throw ValidationError("instance: mask shape differs from observations");
    }
    std::set<std::pair<int, int>> observed;
    for (const Entry& e : obs.entries) observed.insert({e.row, e.col});
    for (auto [r, c] : mask->cells) {
      if (observed.find({r, c}) == observed.end()) {
        throw ValidationError("instance: mask flags unobserved cell " +
                              cell_str(r, c));
      }
    }
  }
  if (params != nullptr) {
    validate_params(*params);
  }
}

}  // namespace ewad
