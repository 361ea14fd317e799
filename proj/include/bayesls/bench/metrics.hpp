#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "../errors.hpp"

namespace bayesls::bench {

/// (f - f*) / (1 + |f*|) < 1e-4.
inline bool converged_f(double f_solver, double f_star, double tol = 1e-4) {
  return (f_solver - f_star) / (1.0 + std::abs(f_star)) < tol;
}

/// ||g||_inf / (1 + |f|) < 1e-6.
inline bool converged_g(double g_inf, double f_solver, double tol = 1e-6) {
  return g_inf / (1.0 + std::abs(f_solver)) < tol;
}

/// Time per evaluation not spent inside the objective, in the unit of the
/// arguments.
inline double overhead_per_eval(double t_total, long n_evals, double t_eval_expected) {
  if (n_evals < 1) throw invalid_parameter("overhead needs at least one evaluation");
  return t_total / static_cast<double>(n_evals) - t_eval_expected;
}

inline std::vector<double> best_so_far(const std::vector<double>& history) {
  std::vector<double> out(history.size());
  double best = history.empty() ? 0.0 : history.front();
  for (std::size_t k = 0; k < history.size(); ++k) {
    best = std::min(best, history[k]);
    out[k] = best;
  }
  return out;
}

/// Index of the first evaluation that meets the f-criterion, or the last
/// index when none does. Zero for an empty history.
inline std::size_t discovery_index(const std::vector<double>& history, double f_star) {
  for (std::size_t k = 0; k < history.size(); ++k)
    if (converged_f(history[k], f_star)) return k;
  return history.empty() ? 0 : history.size() - 1;
}

struct CurvePoint {
  double evals = 0.0;
  double distance = 0.0;
};

struct Curve {
  std::vector<CurvePoint> points;
  /// Set when the first evaluation already sits at f*; all distances are 0.
  bool degenerate = false;
};

/// Best-so-far distance to f*, divided by the distance at the first
/// evaluation, against evaluation index divided by `discovery`. Passing the
/// same discovery index for several solvers on one problem puts them on a
/// common x-axis; the y-axis is shared because every solver starts at x0.
inline Curve normalized_eval_curve(const std::vector<double>& history, double f_star,
                                   std::size_t discovery) {
  Curve c;
  if (history.empty()) return c;
  const std::vector<double> best = best_so_far(history);
  const double d0 = history.front() - f_star;
  const double scale = discovery == 0 ? 1.0 : static_cast<double>(discovery);
  c.degenerate = !(d0 > 0.0);
  c.points.reserve(best.size());
  for (std::size_t k = 0; k < best.size(); ++k) {
    const double d = c.degenerate ? 0.0 : std::max(0.0, best[k] - f_star) / d0;
    c.points.push_back({static_cast<double>(k) / scale, d});
  }
  return c;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  if (v.size() % 2 == 1) return v[m];
  const double hi = v[m];
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (lo + hi);
}

} // namespace bayesls::bench
