#include "ewad/completion/completion.hpp"

#include <cmath>

#include "ewad/common/error.hpp"

namespace ewad {

RateEstimate estimate_rates(const SparseObservations& obs, int rank,
                            const SvdOptions& svd_options) {
  validate_observations(obs);
  if (obs.entries.empty()) {
    throw ValidationError("estimate_rates: no observed entries");
  }
  Matrix filled = Matrix::Zero(obs.rows, obs.cols);
  for (const Entry& e : obs.entries) {
    filled(e.row, e.col) = static_cast<double>(e.count);
  }
  SvdTriple svd = truncated_svd(filled, rank, svd_options);
  double inv_fill = static_cast<double>(obs.rows) *
                    static_cast<double>(obs.cols) /
                    static_cast<double>(obs.entries.size());
  RateEstimate out;
  out.raw = inv_fill * svd.reconstruct();
  out.clipped.values = out.raw.cwiseMax(kRateFloor);
  return out;
}

RecoveryErrors recovery_errors(const Matrix& est, const RateMatrix& truth,
                               double scale) {
  if (!std::isfinite(scale) || scale <= 0.0) {
    throw ValidationError("recovery_errors: scale must be positive");
  }
  if (est.rows() != truth.values.rows() || est.cols() != truth.values.cols()) {
    throw ValidationError("recovery_errors: shape mismatch");
  }
  Matrix diff = est / scale - truth.values;
  RecoveryErrors out;
  out.frobenius = diff.norm();
  out.max_abs = diff.cwiseAbs().maxCoeff();
  return out;
}

}  // namespace ewad
