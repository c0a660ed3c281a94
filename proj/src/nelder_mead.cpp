#include "ewad/estimator/nelder_mead.hpp"

#include <algorithm>
#include <cmath>

#include "ewad/common/error.hpp"

namespace ewad {

namespace {

void clamp_to_box(std::vector<double>& x, const std::vector<double>& lo,
                  const std::vector<double>& hi) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::clamp(x[i], lo[i], hi[i]);
  }
}

double simplex_diameter(const std::vector<std::vector<double>>& pts) {
  double d = 0.0;
  for (std::size_t a = 1; a < pts.size(); ++a) {
    double dist = 0.0;
    for (std::size_t i = 0; i < pts[a].size(); ++i) {
      dist = std::max(dist, std::abs(pts[a][i] - pts[0][i]));
    }
    d = std::max(d, dist);
  }
  return d;
}

}  // namespace

NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& objective,
    std::vector<double> start, const std::vector<double>& lo,
    const std::vector<double>& hi, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  if (lo.size() != dim || hi.size() != dim) {
    throw ValidationError("nelder_mead: bound dimensions mismatch");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (!(lo[i] <= hi[i])) {
      throw ValidationError("nelder_mead: invalid bounds");
    }
  }
  clamp_to_box(start, lo, hi);

  std::vector<std::size_t> free_dims;
  for (std::size_t i = 0; i < dim; ++i) {
    if (hi[i] > lo[i]) free_dims.push_back(i);
  }

  NelderMeadResult result;
  int evals = 0;
  auto eval = [&](std::vector<double> x) {
    clamp_to_box(x, lo, hi);
    ++evals;
    return std::make_pair(objective(x), std::move(x));
  };

  auto [f0, x0] = eval(start);
  if (free_dims.empty()) {
    result.x = std::move(x0);
    result.value = f0;
    result.evaluations = evals;
    result.converged = true;
    return result;
  }

  // Vertices: start plus one perturbed point per free coordinate.
  std::vector<std::vector<double>> pts{std::move(x0)};
  std::vector<double> vals{f0};
  for (std::size_t fi : free_dims) {
    std::vector<double> p = pts[0];
    double step = options.initial_step * (hi[fi] - lo[fi]);
    p[fi] = (p[fi] + step <= hi[fi]) ? p[fi] + step : p[fi] - step;
    auto [fv, pv] = eval(std::move(p));
    pts.push_back(std::move(pv));
    vals.push_back(fv);
  }

  const std::size_t count = pts.size();
  auto order = [&]() {
    std::vector<std::size_t> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) {
                       return vals[a] < vals[b];
                     });
    std::vector<std::vector<double>> p2(count);
    std::vector<double> v2(count);
    for (std::size_t i = 0; i < count; ++i) {
      p2[i] = std::move(pts[idx[i]]);
      v2[i] = vals[idx[i]];
    }
    pts = std::move(p2);
    vals = std::move(v2);
  };

  bool converged = false;
  while (evals < options.max_evals) {
    order();
    if (vals[count - 1] - vals[0] <=
            options.tol * (1.0 + std::abs(vals[0])) &&
        simplex_diameter(pts) <= options.tol) {
      converged = true;
      break;
    }
    // Centroid of all but the worst vertex.
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t a = 0; a + 1 < count; ++a) {
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += pts[a][i];
    }
    for (std::size_t i = 0; i < dim; ++i) {
      centroid[i] /= static_cast<double>(count - 1);
    }
    const std::vector<double>& worst = pts[count - 1];
    auto blend = [&](double coef) {
      std::vector<double> p(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        p[i] = centroid[i] + coef * (centroid[i] - worst[i]);
      }
      return p;
    };

    auto [f_ref, x_ref] = eval(blend(1.0));
    if (f_ref < vals[0]) {
      if (evals < options.max_evals) {
        auto [f_exp, x_exp] = eval(blend(2.0));
        if (f_exp < f_ref) {
          pts[count - 1] = std::move(x_exp);
          vals[count - 1] = f_exp;
          continue;
        }
      }
      pts[count - 1] = std::move(x_ref);
      vals[count - 1] = f_ref;
      continue;
    }
    if (f_ref < vals[count - 2]) {
      pts[count - 1] = std::move(x_ref);
      vals[count - 1] = f_ref;
      continue;
    }
    if (evals >= options.max_evals) break;
    auto [f_con, x_con] = eval(blend(f_ref < vals[count - 1] ? 0.5 : -0.5));
    if (f_con < std::min(f_ref, vals[count - 1])) {
      pts[count - 1] = std::move(x_con);
      vals[count - 1] = f_con;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t a = 1; a < count && evals < options.max_evals; ++a) {
      std::vector<double> p(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        p[i] = pts[0][i] + 0.5 * (pts[a][i] - pts[0][i]);
      }
      auto [fv, pv] = eval(std::move(p));
      pts[a] = std::move(pv);
      vals[a] = fv;
    }
  }

  order();
  result.x = pts[0];
  result.value = vals[0];
  result.evaluations = evals;
  result.converged = converged;
  return result;
}

}  // namespace ewad
