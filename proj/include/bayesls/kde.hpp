#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"

namespace bayesls {

/// Gaussian kernel density estimate over a set of steps.
class KdeEstimate {
public:
  KdeEstimate(std::vector<double> points, double bandwidth)
      : points_(std::move(points)), h_(bandwidth) {
    if (points_.empty()) throw invalid_parameter("KDE needs at least one point");
    if (!(h_ > 0.0) || !std::isfinite(h_))
      throw invalid_parameter("KDE bandwidth must be positive and finite");
  }

  double bandwidth() const noexcept { return h_; }
  const std::vector<double>& points() const noexcept { return points_; }

  double density(double x) const noexcept {
    double sum = 0.0;
    for (double p : points_) {
      const double z = (x - p) / h_;
      sum += std::exp(-0.5 * z * z);
    }
    return sum / (static_cast<double>(points_.size()) * h_ *
                  std::sqrt(2.0 * std::numbers::pi));
  }

private:
  std::vector<double> points_;
  double h_;
};

inline double kde_density(const KdeEstimate& est, double x) noexcept {
  return est.density(x);
}

/// Silverman's rule of thumb, 1.06 * sd * n^(-1/5), floored at `floor`.
inline double silverman_bandwidth(std::span<const double> points, double floor) {
  const auto n = static_cast<double>(points.size());
  double sd = 0.0;
  if (points.size() > 1) {
    double mean = 0.0;
    for (double p : points) mean += p;
    mean /= n;
    double ss = 0.0;
    for (double p : points) ss += (p - mean) * (p - mean);
    sd = std::sqrt(ss / (n - 1.0));
  }
  return std::max(1.06 * sd * std::pow(n, -0.2), floor);
}

/// Observed step strictly inside (lo, hi) where the density of all steps
/// in [lo, hi] peaks. Ties go to the smaller step. The bounds may be given
/// in either order.
inline double densest_point(std::span<const double> points, double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  std::vector<double> window;
  std::vector<double> interior;
  for (double p : points) {
    if (p >= lo && p <= hi) window.push_back(p);
    if (p > lo && p < hi) interior.push_back(p);
  }
  if (interior.empty())
    throw no_interior_point("no observed step lies strictly inside the interval");
  std::sort(interior.begin(), interior.end());
  const KdeEstimate est(window, silverman_bandwidth(window, 1e-3 * (hi - lo)));
  double best = interior.front();
  double best_density = est.density(best);
  for (std::size_t i = 1; i < interior.size(); ++i) {
    const double d = est.density(interior[i]);
    if (d > best_density) {
      best = interior[i];
      best_density = d;
    }
  }
  return best;
}

} // namespace bayesls
