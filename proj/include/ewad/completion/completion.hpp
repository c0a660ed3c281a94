#pragma once

#include "ewad/core/types.hpp"
#include "ewad/linalg/svd.hpp"

namespace ewad {

// Inverse-propensity-weighted rank-r de-noising of the zero-filled counts:
//   raw = (n * m / |Omega|) * SVD_r(zero-filled X).
// `clipped` floors raw at kRateFloor so it is a valid rate matrix.
struct RateEstimate {
  Matrix raw;
  RateMatrix clipped;
};

RateEstimate estimate_rates(const SparseObservations& obs, int rank,
                            const SvdOptions& svd_options = {});

// Frobenius and entrywise-max error of est / scale against the truth.
struct RecoveryErrors {
  double frobenius = 0.0;
  double max_abs = 0.0;
};

RecoveryErrors recovery_errors(const Matrix& est, const RateMatrix& truth,
                               double scale = 1.0);

}  // namespace ewad
