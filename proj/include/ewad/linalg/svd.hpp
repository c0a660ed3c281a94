#pragma once

#include <cstdint>

#include "ewad/core/types.hpp"

namespace ewad {

// Rank-r factorization A ~ U * diag(sigma) * V^T with U (n x r), V (m x r)
// orthonormal columns and sigma sorted descending.
struct SvdTriple {
  Matrix u;
  Vector sigma;
  Matrix v;

  Matrix reconstruct() const { return u * sigma.asDiagonal() * v.transpose(); }
};

struct SvdOptions {
  // Below this min-dimension a full dense SVD is taken and truncated;
  // above it a randomized subspace iteration is used.
  int dense_cutoff = 512;
  int oversample = 8;       // extra columns in the random test matrix
  int power_iters = 4;      // minimum power iterations (randomized path)
  double tol = 1e-8;        // relative singular-value stall tolerance
  int max_iter = 300;       // power-iteration cap (randomized path)
  std::uint64_t seed = 0;   // seed for the Gaussian test matrix
};

// Best rank-r approximation factors of A.  Throws ValidationError when rank
// is outside [1, min(n, m)] and ConvergenceError (with the final residual in
// the message) if the randomized path stalls past the iteration cap.
SvdTriple truncated_svd(const Matrix& a, int rank, const SvdOptions& options = {});

// All singular values of A in descending order.  Uses the fast
// divide-and-conquer kernel and falls back to one-sided Jacobi when the
// returned spectrum fails basic sanity checks (rare numerical edge cases).
Vector singular_values(const Matrix& a);

// Singular value soft-thresholding: U * max(sigma - tau, 0) * V^T.
// tau must be >= 0 and finite.
Matrix soft_threshold_svd(const Matrix& a, double tau);

}  // namespace ewad
