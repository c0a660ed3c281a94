#pragma once

#include <functional>
#include <vector>

namespace ewad {

struct NelderMeadOptions {
  double tol = 1e-6;       // stop when value spread and simplex size fall below
  int max_evals = 500;     // objective evaluation budget
  double initial_step = 0.05;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Downhill simplex minimization with box constraints handled by projection:
// every candidate is clamped into [lo, hi] before evaluation.  Coordinates
// with lo == hi stay fixed.
NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& objective,
    std::vector<double> start, const std::vector<double>& lo,
    const std::vector<double>& hi, const NelderMeadOptions& options = {});

}  // namespace ewad
