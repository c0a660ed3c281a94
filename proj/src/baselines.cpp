#include "ewad/baselines/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ewad/common/error.hpp"
#include "ewad/linalg/svd.hpp"

namespace ewad {

namespace {

Matrix zero_filled(const SparseObservations& obs) {
  Matrix x = Matrix::Zero(obs.rows, obs.cols);
  for (const Entry& e : obs.entries) {
    x(e.row, e.col) = static_cast<double>(e.count);
  }
  return x;
}

Matrix observation_mask(const SparseObservations& obs) {
  Matrix mask = Matrix::Zero(obs.rows, obs.cols);
  for (const Entry& e : obs.entries) mask(e.row, e.col) = 1.0;
  return mask;
}

double nuclear_norm(const Matrix& m) { return singular_values(m).sum(); }

Matrix soft_shrink(const Matrix& m, double tau) {
  return m.unaryExpr([tau](double v) {
    double mag = std::abs(v) - tau;
    return mag > 0.0 ? (v > 0.0 ? mag : -mag) : 0.0;
  });
}

void check_options(const SolverOptions& options) {
  if (options.max_iter < 1 || !(options.tol > 0.0)) {
    throw ValidationError("solver: max_iter must be >= 1 and tol > 0");
  }
}

}  // namespace

Decomposition soft_impute(const SparseObservations& obs, double lambda,
                          const SolverOptions& options) {
  validate_observations(obs);
  check_options(options);
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ValidationError("soft_impute: lambda must be >= 0");
  }
  const Matrix x = zero_filled(obs);
  const Matrix mask = observation_mask(obs);

  auto objective = [&](const Matrix& m) {
    double fit = (mask.array() * (x - m).array()).matrix().squaredNorm();
    return fit + lambda * nuclear_norm(m);
  };

  Decomposition out;
  out.m_hat = Matrix::Zero(obs.rows, obs.cols);
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    Matrix target =
        (mask.array() * x.array() + (1.0 - mask.array()) * out.m_hat.array())
            .matrix();
    Matrix next = soft_threshold_svd(target, lambda / 2.0);
    double change =
        (next - out.m_hat).norm() / std::max(out.m_hat.norm(), 1e-12);
    out.m_hat = std::move(next);
    out.iterations = iter;
    out.objective_history.push_back(objective(out.m_hat));
    if (change < options.tol) {
      out.converged = true;
      break;
    }
  }
  out.a_hat = Matrix::Zero(obs.rows, obs.cols);
  out.objective = out.objective_history.back();
  return out;
}

Decomposition stable_pcp(const SparseObservations& obs, double lambda,
                         double mu, std::optional<double> max_cap,
                         const SolverOptions& options) {
  validate_observations(obs);
  check_options(options);
  if (!std::isfinite(lambda) || lambda < 0.0 || !std::isfinite(mu) ||
      mu <= 0.0) {
    throw ValidationError("stable_pcp: need lambda >= 0 and mu > 0");
  }
  if (max_cap && !(*max_cap > 0.0)) {
    throw ValidationError("stable_pcp: max_cap must be positive");
  }
  const Matrix x = zero_filled(obs);
  const Matrix mask = observation_mask(obs);
  const double svt_tau = 1.0 / (2.0 * mu);
  const double sparse_tau = lambda / (2.0 * mu);

  auto clip = [&](Matrix& m) {
    if (max_cap) m = m.cwiseMax(-*max_cap).cwiseMin(*max_cap);
  };
  auto objective = [&](const Matrix& m, const Matrix& a) {
    double fit = (mask.array() * (m + a - x).array()).matrix().squaredNorm();
    return nuclear_norm(m) + lambda * a.cwiseAbs().sum() + mu * fit;
  };

  Decomposition out;
  out.m_hat = soft_threshold_svd(x, svt_tau);
  clip(out.m_hat);
  out.a_hat = Matrix::Zero(obs.rows, obs.cols);
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    Matrix a_next =
        soft_shrink((mask.array() * (x - out.m_hat).array()).matrix(),
                    sparse_tau);
    clip(a_next);
    Matrix target = (mask.array() * (x - a_next).array() +
                     (1.0 - mask.array()) * out.m_hat.array())
                        .matrix();
    Matrix m_next = soft_threshold_svd(target, svt_tau);
    clip(m_next);
    double denom = std::max(out.m_hat.norm() + out.a_hat.norm(), 1e-12);
    double change =
        ((m_next - out.m_hat).norm() + (a_next - out.a_hat).norm()) / denom;
    out.m_hat = std::move(m_next);
    out.a_hat = std::move(a_next);
    out.iterations = iter;
    out.objective_history.push_back(objective(out.m_hat, out.a_hat));
    if (change < options.tol) {
      out.converged = true;
      break;
    }
  }
  out.objective = out.objective_history.back();
  return out;
}

Decomposition drmf(const SparseObservations& obs, int rank, std::int64_t e,
                   const SolverOptions& options) {
  validate_observations(obs);
  check_options(options);
  if (rank < 1 || rank > std::min(obs.rows, obs.cols)) {
    throw ValidationError("drmf: rank out of range");
  }
  if (e < 0 || e > static_cast<std::int64_t>(obs.entries.size())) {
    throw ValidationError("drmf: anomaly budget out of range");
  }
  const Matrix x = zero_filled(obs);
  const Matrix mask = observation_mask(obs);
  auto objective = [&](const Matrix& m, const Matrix& a) {
    return (mask.array() * (x - a - m).array()).matrix().norm();
  };

  Decomposition out;
  out.m_hat = truncated_svd(x, rank).reconstruct();
  out.a_hat = Matrix::Zero(obs.rows, obs.cols);
  double prev_obj = objective(out.m_hat, out.a_hat);

  std::vector<std::size_t> idx(obs.entries.size());
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    // A-step: keep the e largest observed residuals (ties by cell order).
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const Entry& ea = obs.entries[a];
      const Entry& eb = obs.entries[b];
      double ra = std::abs(x(ea.row, ea.col) - out.m_hat(ea.row, ea.col));
      double rb = std::abs(x(eb.row, eb.col) - out.m_hat(eb.row, eb.col));
      if (ra != rb) return ra > rb;
      if (ea.row != eb.row) return ea.row < eb.row;
      return ea.col < eb.col;
    });
    out.a_hat.setZero();
    for (std::int64_t i = 0; i < e; ++i) {
      const Entry& en = obs.entries[idx[static_cast<std::size_t>(i)]];
      out.a_hat(en.row, en.col) = x(en.row, en.col) - out.m_hat(en.row, en.col);
    }
    // M-step: best rank-r fit to the zero-filled deflated matrix.
    out.m_hat = truncated_svd(x - out.a_hat, rank).reconstruct();
    double obj = objective(out.m_hat, out.a_hat);
    out.iterations = iter;
    out.objective_history.push_back(obj);
    if (obj <= 1e-12 ||
        std::abs(prev_obj - obj) <= options.tol * std::max(prev_obj, 1e-12)) {
      out.converged = true;
      out.objective = obj;
      break;
    }
    prev_obj = obj;
    out.objective = obj;
  }
  return out;
}

int numerical_rank(const Matrix& m, double rel_tol) {
  Vector sigma = singular_values(m);
  if (sigma.size() == 0 || sigma(0) <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) >= rel_tol * sigma(0)) ++rank;
  }
  return rank;
}

TunedPenalty tune_rank_lambda(
    const SparseObservations& obs, int target_rank,
    const std::function<Decomposition(double)>& solve) {
  validate_observations(obs);
  if (target_rank < 1 || target_rank > std::min(obs.rows, obs.cols)) {
    throw ValidationError("tune_rank_lambda: target rank out of range");
  }
  const Matrix x = zero_filled(obs);
  double sigma1 = truncated_svd(x, 1).sigma(0);
  if (!(sigma1 > 0.0)) {
    throw ValidationError("tune_rank_lambda: observations are identically "
                          "zero");
  }
  constexpr double kGridRatio = 1.3;
  constexpr int kGridSteps = 60;
  double lambda = 0.01 * sigma1;
  TunedPenalty best;
  int best_dist = std::numeric_limits<int>::max();
  for (int k = 0; k < kGridSteps; ++k, lambda *= kGridRatio) {
    Decomposition dec = solve(lambda);
    int rank = numerical_rank(dec.m_hat);
    int dist = std::abs(rank - target_rank);
    if (dist < best_dist) {
      best_dist = dist;
      best.lambda = lambda;
      best.achieved_rank = rank;
      best.solution = std::move(dec);
    }
    if (rank == target_rank) {
      best.matched = true;
      return best;
    }
    // Rank only decreases as the penalty grows; once it drops below the
    // target no later grid point can match.
    if (rank < target_rank) break;
  }
  best.matched = best.achieved_rank == target_rank;
  return best;
}

TunedPenalty tune_rank_lambda(const SparseObservations& obs, int target_rank,
                              const std::string& solver_id, double pcp_ratio,
                              std::optional<double> max_cap,
                              const SolverOptions& options) {
  if (solver_id == "soft-impute") {
    return tune_rank_lambda(obs, target_rank, [&](double lambda) {
      return soft_impute(obs, lambda, options);
    });
  }
  if (solver_id == "stable-pcp") {
    // The tuned penalty is the SVT threshold 1 / (2 mu); holding
    // lambda / mu fixed keeps the sparse threshold at pcp_ratio / 2.
    return tune_rank_lambda(obs, target_rank, [&](double threshold) {
      double mu = 1.0 / (2.0 * threshold);
      double lambda = pcp_ratio * mu;
      return stable_pcp(obs, lambda, mu, max_cap, options);
    });
  }
  throw ValidationError("tune_rank_lambda: unknown solver '" + solver_id +
                        "'");
}

}  // namespace ewad
