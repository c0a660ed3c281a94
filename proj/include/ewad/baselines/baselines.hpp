#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ewad/core/types.hpp"

namespace ewad {

// Output of a matrix-decomposition baseline: low-rank part, sparse anomaly
// part (zero off the observed set), and the solver trajectory.
struct Decomposition {
  Matrix m_hat;
  Matrix a_hat;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
  std::vector<double> objective_history;  // objective after each iteration
};

struct SolverOptions {
  int max_iter = 300;
  double tol = 1e-5;  // relative change of the iterates
};

// Nuclear-norm-regularized completion
//   min ||P_Omega(X - M)||_F^2 + lambda ||M||_*
// by iterating M <- SVT(P_Omega(X) + P_Omega_c(M), lambda / 2).
// The anomaly part is identically zero.
Decomposition soft_impute(const SparseObservations& obs, double lambda,
                          const SolverOptions& options = {});

// Sparse + low-rank decomposition
//   min ||M||_* + lambda ||A||_1 + mu ||P_Omega(M + A - X)||_F^2
// by alternating M <- SVT(fill-in(X - A), 1 / (2 mu)) with the unobserved
// cells imputed from the current M, and A <- entrywise soft-threshold of
// X - M on Omega at lambda / (2 mu).  Initialization: M = SVT(zero-filled X,
// 1 / (2 mu)), A = 0.  With max_cap set, both M and A are projected
// entrywise into [-max_cap, max_cap] after every iteration (the capped
// variant used as the max-norm-constrained baseline).
Decomposition stable_pcp(const SparseObservations& obs, double lambda,
                         double mu, std::optional<double> max_cap = {},
                         const SolverOptions& options = {});

// Rank-constrained decomposition with a cardinality budget on anomalies
//   min ||P_Omega(X - A - M)||_F  s.t.  rank(M) <= r, ||A||_0 <= e
// by alternating A <- the e largest-|residual| observed cells of X - M, and
// M <- rank-r SVD of the zero-filled X - A.  Initialization:
// M = rank-r SVD of the zero-filled X.
Decomposition drmf(const SparseObservations& obs, int rank, std::int64_t e,
                   const SolverOptions& options = {});

struct TunedPenalty {
  double lambda = 0.0;
  int achieved_rank = 0;
  bool matched = false;  // achieved_rank == target on some grid point
  Decomposition solution;
};

// Scans the geometric penalty grid lambda_k = lambda0 * 1.3^k with
// lambda0 = 0.01 * sigma_1(zero-filled X) and returns the smallest penalty
// whose solution has numerical rank (#{sigma_i >= 1e-6 sigma_1}) at most
// target_rank, preferring exact equality.  `solve` maps a penalty to a
// Decomposition; `matched == false` signals that no grid point achieved a
// rank <= target (the closest is returned).
TunedPenalty tune_rank_lambda(
    const SparseObservations& obs, int target_rank,
    const std::function<Decomposition(double)>& solve);

// Convenience overload: solver selected by id, "soft-impute" (penalty is
// its lambda) or "stable-pcp" (penalty is the SVT threshold 1 / (2 mu) at a
// fixed ratio lambda / mu, so the sparse threshold lambda / (2 mu) stays
// constant while the rank is tuned).
TunedPenalty tune_rank_lambda(const SparseObservations& obs, int target_rank,
                              const std::string& solver_id,
                              double pcp_ratio = 1.0,
                              std::optional<double> max_cap = {},
                              const SolverOptions& options = {});

// Numerical rank used by the tuner.
int numerical_rank(const Matrix& m, double rel_tol = 1e-6);

}  // namespace ewad
