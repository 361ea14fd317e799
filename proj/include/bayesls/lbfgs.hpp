#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "objective.hpp"
#include "outcome.hpp"
#include "wolfe.hpp"

namespace bayesls {

/// Box constraints l <= x <= u.
struct Bounds {
  Vector lower;
  Vector upper;

  bool contains(const Vector& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }
  Vector clip(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
};

enum class SolveStatus { converged, max_iterations, time_limit, line_search_failure };

inline std::string_view to_string(SolveStatus s) noexcept {
  switch (s) {
  case SolveStatus::converged: return "converged";
  case SolveStatus::max_iterations: return "max_iterations";
  case SolveStatus::time_limit: return "time_limit";
  case SolveStatus::line_search_failure: return "line_search_failure";
  }
  return "unknown";
}

struct SolveOptions {
  /// Stop when ||g||_inf / (1 + |f|) < tol_g (projected gradient if boxed).
  double tol_g = 1e-7;
  int max_iter = 5000;
  std::chrono::duration<double> time_limit{60.0};
  /// Number of stored correction pairs.
  int memory = 10;
  /// Line-search parameters; alpha_max is overwritten per iteration.
  WolfeParams line_search{};
  /// Step cap used when no bound limits the ray.
  double unbounded_alpha_max = 1e10;
  std::optional<Bounds> bounds;
  /// Called after every line search with the origin, the direction and
  /// the outcome.
  std::function<void(const Vector&, const Vector&, const LineSearchOutcome&)> on_line_search;
};

struct IterationRecord {
  double f = 0.0;
  double g_inf = 0.0;
  double step = 0.0;
  int line_search_evals = 0;
  Status line_search_status = Status::eval_error;
};

struct SolveReport {
  Vector x;
  double f = 0.0;
  double g_inf = 0.0;
  /// Projected-gradient infinity norm; equals g_inf without bounds.
  double pg_inf = 0.0;
  int evaluations = 0;
  int line_search_evaluations = 0;
  /// Evaluations outside line searches (start point, bound re-evaluations).
  int other_evaluations = 0;
  int iterations = 0;
  int skipped_pairs = 0;
  double wall_time_s = 0.0;
  SolveStatus status = SolveStatus::max_iterations;
  std::vector<IterationRecord> records;
  /// Objective value of every evaluation, in order.
  std::vector<double> eval_history;
};

namespace detail {

inline double projected_gradient_inf(const Vector& x, const Vector& g,
                                     const std::optional<Bounds>& bounds) {
  if (!bounds) return g.lpNorm<Eigen::Infinity>();
  return (bounds->clip(x - g) - x).lpNorm<Eigen::Infinity>();
}

// Zeroes components that would leave the box from an active bound.
inline void mask_direction(Vector& p, const Vector& x, const Bounds& b) {
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if ((x(i) <= b.lower(i) && p(i) < 0.0) || (x(i) >= b.upper(i) && p(i) > 0.0)) p(i) = 0.0;
}

inline double ratio_test(const Vector& x, const Vector& p, const Bounds& b) {
  double amax = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0)
      amax = std::min(amax, (b.upper(i) - x(i)) / p(i));
    else if (p(i) < 0.0)
      amax = std::min(amax, (b.lower(i) - x(i)) / p(i));
  }
  return amax;
}

} // namespace detail

/// Limited-memory BFGS with a pluggable line search. `ls` is any callable
/// (LineObjective&, const WolfeParams&) -> LineSearchOutcome. With bounds,
/// directions are masked at active bounds and the step is capped so the
/// iterate stays feasible.
template <class LineSearch>
SolveReport solve(const MultivariateObjective& f, const Vector& x0, const LineSearch& ls,
                  const SolveOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  if (x0.size() != f.dimension()) throw dimension_mismatch("start point has wrong dimension");
  if (opt.memory < 1) throw invalid_parameter("memory must be positive");
  if (opt.bounds && !opt.bounds->contains(x0))
    throw invalid_parameter("start point violates the bounds");

  SolveReport rep;
  auto history = std::make_shared<std::vector<double>>();
  const MultivariateObjective counted(f.dimension(), [&f, history](const Vector& x) {
    Evaluation e = f(x);
    history->push_back(e.value);
    return e;
  });

  Vector x = x0;
  Evaluation cur = counted(x);
  rep.other_evaluations = 1;
  if (!std::isfinite(cur.value) || !cur.gradient.allFinite())
    throw non_finite_value(0.0);

  std::deque<std::pair<Vector, Vector>> pairs;
  auto converged = [&] {
    const double pg = detail::projected_gradient_inf(x, cur.gradient, opt.bounds);
    return pg / (1.0 + std::abs(cur.value)) < opt.tol_g;
  };

  auto direction = [&](bool steepest) {
    Vector p = -cur.gradient;
    if (!steepest && !pairs.empty()) {
      const auto m = pairs.size();
      std::vector<double> rho(m), a(m);
      Vector q = cur.gradient;
      for (std::size_t k = m; k-- > 0;) {
        const auto& [s, y] = pairs[k];
        rho[k] = 1.0 / y.dot(s);
        a[k] = rho[k] * s.dot(q);
        q -= a[k] * y;
      }
      const auto& [s_last, y_last] = pairs.back();
      q *= s_last.dot(y_last) / y_last.squaredNorm();
      for (std::size_t k = 0; k < m; ++k) {
        const auto& [s, y] = pairs[k];
        const double b = rho[k] * y.dot(q);
        q += (a[k] - b) * s;
      }
      p = -q;
    }
    if (opt.bounds) detail::mask_direction(p, x, *opt.bounds);
    return p;
  };

  rep.status = SolveStatus::max_iterations;
  for (int iter = 0;; ++iter) {
    if (converged()) {
      rep.status = SolveStatus::converged;
      break;
    }
    if (iter >= opt.max_iter) {
      rep.status = SolveStatus::max_iterations;
      break;
    }
    if (std::chrono::duration<double>(clock::now() - t_start) > opt.time_limit) {
      rep.status = SolveStatus::time_limit;
      break;
    }

    std::optional<LineSearchOutcome> accepted;
    Vector p;
    bool tried_steepest = false;
    for (int attempt = 0; attempt < 2 && !accepted && !tried_steepest; ++attempt) {
      const bool steepest = attempt == 1 || pairs.empty();
      tried_steepest = steepest;
      p = direction(steepest);
      if (!(p.dot(cur.gradient) < 0.0)) continue;
      WolfeParams params = opt.line_search;
      params.alpha_max = opt.bounds ? detail::ratio_test(x, p, *opt.bounds)
                                    : opt.unbounded_alpha_max;
      if (!std::isfinite(params.alpha_max)) params.alpha_max = opt.unbounded_alpha_max;
      if (!(params.alpha_max > 0.0)) continue;
      if (steepest) params.initial_step = std::min(1.0, 1.0 / p.norm());

      LineObjective line(counted, x, p, cur);
      LineSearchOutcome out = ls(line, params);
      rep.line_search_evaluations += out.eval_count;
      if (opt.on_line_search) opt.on_line_search(x, p, out);
      if (out.status != Status::eval_error && out.alpha > 0.0 &&
          out.sample.phi < cur.value) {
        Vector x_new = line.point(out.alpha);
        Evaluation next{out.sample.phi, line.gradient(out.alpha)};
        if (opt.bounds && !opt.bounds->contains(x_new)) {
          x_new = opt.bounds->clip(x_new);
          next = counted(x_new);
          ++rep.other_evaluations;
          if (!(next.value < cur.value)) continue;
        }
        const Vector s = x_new - x;
        const Vector y = next.gradient - cur.gradient;
        const double sy = s.dot(y);
        if (sy > std::numeric_limits<double>::epsilon() * y.squaredNorm() && std::isfinite(sy)) {
          pairs.emplace_back(s, y);
          if (pairs.size() > static_cast<std::size_t>(opt.memory)) pairs.pop_front();
        } else {
          ++rep.skipped_pairs;
        }
        x = std::move(x_new);
        cur = std::move(next);
        accepted = std::move(out);
      } else {
        pairs.clear();
      }
    }
    if (!accepted) {
      rep.status = SolveStatus::line_search_failure;
      break;
    }
    ++rep.iterations;
    rep.records.push_back({cur.value, cur.gradient.lpNorm<Eigen::Infinity>(), accepted->alpha,
                           accepted->eval_count, accepted->status});
  }

  rep.x = x;
  rep.f = cur.value;
  rep.g_inf = cur.gradient.lpNorm<Eigen::Infinity>();
  rep.pg_inf = detail::projected_gradient_inf(x, cur.gradient, opt.bounds);
  rep.eval_history = *history;
  rep.evaluations = static_cast<int>(rep.eval_history.size());
  rep.wall_time_s = std::chrono::duration<double>(clock::now() - t_start).count();
  return rep;
}

} // namespace bayesls
