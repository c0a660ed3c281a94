#include "ewad/linalg/svd.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ewad/common/error.hpp"
#include "ewad/common/rng.hpp"

namespace ewad {

namespace {

// The divide-and-conquer kernel (Eigen's BDCSVD) is fast but has rare
// numerical edge cases where its deflation step produces NaNs or an
// inconsistent factorization.  Every SVD in this library therefore goes
// through the helpers below, which validate the result and redo the
// computation with the slower one-sided Jacobi algorithm when it looks
// implausible.
constexpr double kSvdCheckTol = 1e-7;

bool plausible_spectrum(const Matrix& a, const Vector& sigma) {
  if (sigma.size() == 0 || !sigma.allFinite()) return false;
  for (Eigen::Index i = 0; i + 1 < sigma.size(); ++i) {
    if (sigma(i) < sigma(i + 1)) return false;
  }
  if (sigma(sigma.size() - 1) < 0.0) return false;
  // Frobenius invariant: ||A||_F equals the l2 norm of the spectrum.
  double fro = a.norm();
  return std::abs(fro - sigma.norm()) <= kSvdCheckTol * std::max(1.0, fro);
}

struct ThinFactors {
  Matrix u;
  Vector sigma;
  Matrix v;
};

bool plausible_factors(const Matrix& a, const ThinFactors& f) {
  if (!plausible_spectrum(a, f.sigma)) return false;
  if (!f.u.allFinite() || !f.v.allFinite()) return false;
  double fro = a.norm();
  double resid = (a - f.u * f.sigma.asDiagonal() * f.v.transpose()).norm();
  return resid <= kSvdCheckTol * std::max(1.0, fro);
}

ThinFactors thin_svd(const Matrix& a) {
  ThinFactors out;
  {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU();
    out.sigma = svd.singularValues();
    out.v = svd.matrixV();
  }
  if (!plausible_factors(a, out)) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU();
    out.sigma = svd.singularValues();
    out.v = svd.matrixV();
  }
  return out;
}

void check_rank(const Matrix& a, int rank) {
  int max_rank = static_cast<int>(std::min(a.rows(), a.cols()));
  if (a.rows() == 0 || a.cols() == 0) {
    throw ValidationError("svd: matrix must be non-empty");
  }
  if (rank < 1 || rank > max_rank) {
    std::ostringstream os;
    os << "svd: rank " << rank << " outside [1, " << max_rank << "]";
    throw ValidationError(os.str());
  }
}

SvdTriple truncate(const ThinFactors& svd, int rank) {
  SvdTriple out;
  out.u = svd.u.leftCols(rank);
  out.sigma = svd.sigma.head(rank);
  out.v = svd.v.leftCols(rank);
  return out;
}

Matrix orthonormalize(const Matrix& y) {
  Eigen::HouseholderQR<Matrix> qr(y);
  Matrix q = Matrix::Identity(y.rows(), y.cols());
  q = qr.householderQ() * q;
  return q;
}

// Randomized subspace iteration (Gaussian sketch, QR re-orthonormalization
// each half-step).  Runs at least options.power_iters power iterations and
// keeps going until the leading singular values stall below options.tol.
SvdTriple randomized_svd(const Matrix& a, int rank, const SvdOptions& options) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = a.cols();
  const Eigen::Index sketch =
      std::min<Eigen::Index>(rank + options.oversample, std::min(n, m));
  Rng rng = make_rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix test(m, sketch);
  for (Eigen::Index j = 0; j < sketch; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) test(i, j) = gauss(rng);
  }
  Matrix q = orthonormalize(a * test);
  Vector prev_sigma = Vector::Zero(rank);
  double rel_change = 1.0;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    q = orthonormalize(a.transpose() * q);
    q = orthonormalize(a * q);
    Matrix b = q.transpose() * a;  // sketch x m
    ThinFactors svd = thin_svd(b);
    Vector sigma = svd.sigma.head(rank);
    double scale = std::max(sigma(0), 1e-300);
    rel_change = (sigma - prev_sigma).norm() / scale;
    prev_sigma = sigma;
    if (iter >= options.power_iters && rel_change < options.tol) {
      SvdTriple out;
      out.u = q * svd.u.leftCols(rank);
      out.sigma = sigma;
      out.v = svd.v.leftCols(rank);
      return out;
    }
  }
  std::ostringstream os;
  os << "svd: randomized subspace iteration did not converge in "
     << options.max_iter << " iterations (relative residual " << rel_change
     << ")";
  throw ConvergenceError(os.str());
}

}  // namespace

SvdTriple truncated_svd(const Matrix& a, int rank, const SvdOptions& options) {
  check_rank(a, rank);
  if (std::min(a.rows(), a.cols()) <= options.dense_cutoff) {
    return truncate(thin_svd(a), rank);
  }
  return randomized_svd(a, rank, options);
}

Vector singular_values(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw ValidationError("singular_values: matrix must be non-empty");
  }
  {
    Eigen::BDCSVD<Matrix> svd(a);
    if (plausible_spectrum(a, svd.singularValues())) {
      return svd.singularValues();
    }
  }
  return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

Matrix soft_threshold_svd(const Matrix& a, double tau) {
  if (!std::isfinite(tau) || tau < 0.0) {
    throw ValidationError("soft_threshold_svd: tau must be >= 0 and finite");
  }
  if (a.rows() == 0 || a.cols() == 0) {
    throw ValidationError("soft_threshold_svd: matrix must be non-empty");
  }
  ThinFactors svd = thin_svd(a);
  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < svd.sigma.size(); ++i) {
    if (svd.sigma(i) > tau) ++keep;
  }
  if (keep == 0) return Matrix::Zero(a.rows(), a.cols());
  Vector shrunk = svd.sigma.head(keep).array() - tau;
  return svd.u.leftCols(keep) * shrunk.asDiagonal() *
         svd.v.leftCols(keep).transpose();
}

}  // namespace ewad
