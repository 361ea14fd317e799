#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "gp.hpp"

namespace bayesls {

/// Acquisition value and its x-derivative.
struct AcquisitionValue {
  double value = 0.0;
  double derivative = 0.0;
};

/// Lower confidence bound, LCB(x) = -mean(x) + kappa * std(x). Maximized.
inline AcquisitionValue lcb(const GpPosterior& gp, double kappa, double x) {
  const GpPrediction p = gp.predict(x);
  return {-p.mean + kappa * p.std, -p.dmean + kappa * p.dstd};
}

struct AcquisitionOptions {
  /// DIRECT evaluations of the acquisition.
  int budget = 64;
  /// Iterations of the derivative root polish per start.
  int refine_iterations = 20;
  /// Polish stops once its bracket is narrower than this times (hi - lo).
  double refine_tolerance = 1e-10;
  /// Number of sampled local maxima that get polished.
  int refine_starts = 3;
  /// DIRECT's epsilon in the potentially-optimal test.
  double epsilon = 1e-4;
};

struct AcquisitionResult {
  double x = 0.0;
  double value = 0.0;
  int evaluations_used = 0;
};

namespace detail {

struct AcqSample {
  double x;
  double value;
  double derivative;
};

/// Box-free 1-D DIRECT: trisection of the potentially optimal cells.
template <class Fn>
class DirectMaximizer {
public:
  DirectMaximizer(Fn& fn, double lo, double hi, const AcquisitionOptions& opt)
      : fn_(fn), lo_(lo), hi_(hi), opt_(opt) {}

  AcquisitionResult run() {
    cells_.push_back({0.5 * (lo_ + hi_), 0, sample(0.5 * (lo_ + hi_))});
    while (evals_ + 2 <= opt_.budget) {
      const std::vector<std::size_t> chosen = potentially_optimal();
      if (chosen.empty()) break;
      bool stopped = false;
      for (std::size_t idx : chosen) {
        if (evals_ + 2 > opt_.budget) {
          stopped = true;
          break;
        }
        divide(idx);
      }
      if (stopped) break;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < samples_.size(); ++i)
      if (samples_[i].value > samples_[best].value) best = i;
    best_ = samples_[best];
    polish();
    return {best_.x, best_.value, evals_};
  }

private:
  struct Cell {
    double center;
    int level;
    std::size_t sample;
  };

  std::size_t sample(double x) {
    x = std::clamp(x, lo_, hi_);
    const AcquisitionValue v = fn_(x);
    ++evals_;
    samples_.push_back({x, v.value, v.derivative});
    return samples_.size() - 1;
  }

  double width(int level) const {
    return (hi_ - lo_) * std::pow(3.0, -static_cast<double>(level));
  }

  double value_of(const Cell& c) const { return samples_[c.sample].value; }

  std::vector<std::size_t> potentially_optimal() const {
    // Best cell per level; the first one wins ties.
    std::vector<std::size_t> per_level;
    int max_level = 0;
    for (const auto& c : cells_) max_level = std::max(max_level, c.level);
    for (int lvl = 0; lvl <= max_level; ++lvl) {
      std::size_t best = cells_.size();
      for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i].level != lvl) continue;
        if (best == cells_.size() || value_of(cells_[i]) > value_of(cells_[best]))
          best = i;
      }
      if (best != cells_.size()) per_level.push_back(best);
    }
    double gmax = -std::numeric_limits<double>::infinity();
    for (const auto& c : cells_) gmax = std::max(gmax, value_of(c));

    std::vector<std::size_t> out;
    for (std::size_t j : per_level) {
      const double wj = width(cells_[j].level);
      const double gj = value_of(cells_[j]);
      double kmin = 0.0;
      double kmax = std::numeric_limits<double>::infinity();
      for (std::size_t i : per_level) {
        if (i == j) continue;
        const double wi = width(cells_[i].level);
        const double gi = value_of(cells_[i]);
        if (wi < wj)
          kmin = std::max(kmin, (gi - gj) / (wj - wi));
        else if (wi > wj)
          kmax = std::min(kmax, (gj - gi) / (wi - wj));
      }
      if (!(kmin <= kmax) || !(kmax > 0.0)) continue;
      if (std::isfinite(kmax) &&
          gj + kmax * wj < gmax + opt_.epsilon * std::abs(gmax))
        continue;
      out.push_back(j);
    }
    // Largest cells first.
    std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
      return cells_[a].level < cells_[b].level;
    });
    return out;
  }

  void divide(std::size_t idx) {
    const double third = width(cells_[idx].level) / 3.0;
    const double c = cells_[idx].center;
    const int level = cells_[idx].level + 1;
    cells_[idx].level = level;
    const std::size_t left = sample(c - third);
    const std::size_t right = sample(c + third);
    cells_.push_back({c - third, level, left});
    cells_.push_back({c + third, level, right});
  }

  void consider(const AcqSample& s) {
    if (s.value > best_.value) best_ = s;
  }

  AcqSample eval_point(double x) {
    const std::size_t i = sample(x);
    consider(samples_[i]);
    return samples_[i];
  }

  // Root polish of the derivative around the best few sampled local maxima.
  void polish() {
    std::vector<AcqSample> sorted = samples_;
    std::sort(sorted.begin(), sorted.end(),
              [](const AcqSample& a, const AcqSample& b) { return a.x < b.x; });
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const bool left_ok = i == 0 || sorted[i].value >= sorted[i - 1].value;
      const bool right_ok = i + 1 == sorted.size() || sorted[i].value >= sorted[i + 1].value;
      if (left_ok && right_ok) peaks.push_back(i);
    }
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
      return sorted[a].value > sorted[b].value;
    });
    if (peaks.size() > static_cast<std::size_t>(std::max(opt_.refine_starts, 0)))
      peaks.resize(static_cast<std::size_t>(std::max(opt_.refine_starts, 0)));
    for (std::size_t i : peaks) {
      const double left = i == 0 ? lo_ : sorted[i - 1].x;
      const double right = i + 1 == sorted.size() ? hi_ : sorted[i + 1].x;
      polish_from(sorted[i], left, right);
    }
  }

  void polish_from(const AcqSample& start, double left, double right) {
    if (start.derivative == 0.0) return;
    const bool rightward = start.derivative > 0.0;
    const double far = rightward ? right : left;
    if (far == start.x) return;
    const AcqSample end = eval_point(far);
    const bool still_rising = rightward ? end.derivative > 0.0 : end.derivative < 0.0;
    if (still_rising) return;

    // up.x < down.x with derivative >= 0 at up and <= 0 at down.
    AcqSample up = rightward ? start : end;
    AcqSample down = rightward ? end : start;
    const double tol = opt_.refine_tolerance * (hi_ - lo_);
    double last_width = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt_.refine_iterations; ++it) {
      const double w = down.x - up.x;
      if (w <= tol) break;
      double t = up.x - up.derivative * w / (down.derivative - up.derivative);
      const bool secant_ok = std::isfinite(t) && t > up.x && t < down.x;
      if (!secant_ok || w > 0.5 * last_width) t = 0.5 * (up.x + down.x);
      last_width = w;
      const AcqSample s = eval_point(t);
      if (s.derivative > 0.0)
        up = s;
      else if (s.derivative < 0.0)
        down = s;
      else
        break;
    }
  }

  Fn& fn_;
  double lo_;
  double hi_;
  AcquisitionOptions opt_;
  std::vector<Cell> cells_;
  std::vector<AcqSample> samples_;
  AcqSample best_{};
  int evals_ = 0;
};

} // namespace detail

/// Maximizes `fn` (x -> AcquisitionValue) on [lo, hi]: DIRECT trisection
/// followed by a safeguarded secant/bisection polish of the derivative.
/// Deterministic. A constant function yields the midpoint.
template <class Fn>
AcquisitionResult maximize_on_interval(Fn&& fn, double lo, double hi,
                                       const AcquisitionOptions& opt = {}) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw invalid_parameter("acquisition interval must be finite with lo < hi");
  if (opt.budget < 1) throw invalid_parameter("acquisition budget must be positive");
  detail::DirectMaximizer<std::remove_reference_t<Fn>> direct(fn, lo, hi, opt);
  return direct.run();
}

inline AcquisitionResult maximize_acquisition(const GpPosterior& gp, double kappa,
                                              double lo, double hi,
                                              const AcquisitionOptions& opt = {}) {
  auto fn = [&](double x) { return lcb(gp, kappa, x); };
  return maximize_on_interval(fn, lo, hi, opt);
}

inline AcquisitionResult maximize_acquisition(const GpPosterior& gp, double kappa,
                                              double lo, double hi, int budget) {
  AcquisitionOptions opt;
  opt.budget = budget;
  return maximize_acquisition(gp, kappa, lo, hi, opt);
}

} // namespace bayesls
