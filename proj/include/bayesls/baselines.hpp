#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "objective.hpp"
#include "outcome.hpp"
#include "wolfe.hpp"

namespace bayesls {

namespace detail {

inline void push_record(std::vector<TraceRecord>& trace, Phase phase, const PhiSample& s,
                        double lo, double hi) {
  TraceRecord r;
  r.phase = phase;
  r.iteration = static_cast<int>(trace.size());
  r.alpha = s.alpha;
  r.phi = s.phi;
  r.dphi = s.dphi;
  r.lo = lo;
  r.hi = hi;
  trace.push_back(r);
}

/// Minimizer of the cubic Hermite interpolant through (a, fa, da) and
/// (b, fb, db), or nullopt when the cubic has no interior minimizer.
inline std::optional<double> cubic_minimizer(double a, double fa, double da, double b,
                                             double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (!(disc >= 0.0)) return std::nullopt;
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0) return std::nullopt;
  const double t = b - (b - a) * (db + d2 - d1) / denom;
  if (!std::isfinite(t)) return std::nullopt;
  return t;
}

} // namespace detail

/// Armijo backtracking: alpha0 * rho^k for the smallest k that gives
/// sufficient decrease.
class BacktrackingLineSearch {
public:
  static constexpr const char* name = "backtracking";

  explicit BacktrackingLineSearch(double contraction = 0.5, int max_halvings = 60)
      : rho_(contraction), max_halvings_(max_halvings) {
    if (!(rho_ > 0.0 && rho_ < 1.0)) throw invalid_parameter("contraction must lie in (0, 1)");
  }

  LineSearchOutcome operator()(LineObjective& obj, const WolfeParams& params) const {
    LineSearchOutcome out;
    ObservationSet observations;
    observations.add(obj.at_zero());
    const int start = obj.eval_count();
    const PhiSample s0 = obj.at_zero();
    auto finish = [&](const PhiSample& s, Status status) {
      out.alpha = s.alpha;
      out.sample = s;
      out.status = status;
      out.eval_count = obj.eval_count() - start;
      out.observations = observations.samples();
      return out;
    };

    double alpha = params.first_step();
    for (int k = 0; k <= max_halvings_; ++k, alpha *= rho_) {
      PhiSample s;
      try {
        s = obj.eval(alpha);
      } catch (const non_finite_value&) {
        continue;
      }
      observations.add(s);
      detail::push_record(out.trace, Phase::refine, s, 0.0, alpha);
      if (sufficient_decrease(s0, s, params.mu)) return finish(s, Status::sufficient_decrease);
    }
    auto [best, status] = select_fallback(observations, s0, params);
    return finish(best, status == Status::strong_wolfe ? Status::budget_exhausted : status);
  }

private:
  double rho_;
  int max_halvings_;
};

/// Bracketing strong-Wolfe search: expand until a bracket is found, then
/// zoom with safeguarded cubic interpolation. Interpolated steps are kept
/// in the middle 80% of the bracket, and a bisection is forced when two
/// zoom steps fail to shrink the bracket by the shrink factor.
class BracketingLineSearch {
public:
  static constexpr const char* name = "bracketing";

  LineSearchOutcome operator()(LineObjective& obj, const WolfeParams& params) const {
    params.validate();
    LineSearchOutcome out;
    ObservationSet observations;
    observations.add(obj.at_zero());
    const int start = obj.eval_count();
    const PhiSample s0 = obj.at_zero();
    auto finish = [&](const PhiSample& s, Status status) {
      out.alpha = s.alpha;
      out.sample = s;
      out.status = status;
      out.eval_count = obj.eval_count() - start;
      out.observations = observations.samples();
      return out;
    };
    auto wolfe = [&](const PhiSample& s) { return strong_wolfe(s0, s, params.mu, params.eta); };

    PhiSample prev = s0;
    double cap = params.alpha_max;
    double alpha = params.first_step();
    int failures = 0;
    std::optional<std::pair<PhiSample, PhiSample>> bracket;
    for (int i = 0;; ) {
      PhiSample s;
      try {
        s = obj.eval(alpha);
      } catch (const non_finite_value&) {
        if (++failures > 60) return finish(s0, Status::eval_error);
        cap = prev.alpha + 0.5 * (alpha - prev.alpha);
        alpha = cap;
        continue;
      }
      observations.add(s);
      detail::push_record(out.trace, Phase::expand, s, prev.alpha, alpha);
      if (!sufficient_decrease(s0, s, params.mu) || (i > 0 && s.phi >= prev.phi)) {
        bracket.emplace(prev, s);
        break;
      }
      if (wolfe(s)) return finish(s, Status::strong_wolfe);
      if (s.dphi >= 0.0) {
        bracket.emplace(s, prev);
        break;
      }
      if (alpha >= cap) {
        if (alpha == params.alpha_max) return finish(s, Status::max_step_returned);
        break;
      }
      prev = s;
      alpha = std::min(params.expansion * alpha, cap);
      ++i;
      ++out.expansions;
    }
    out.expansion_evals = obj.eval_count() - start;

    if (bracket) {
      if (auto hit = zoom(obj, params, bracket->first, bracket->second, observations, out.trace))
        return finish(*hit, Status::strong_wolfe);
    }
    auto [best, status] = select_fallback(observations, s0, params);
    return finish(best, status);
  }

private:
  static std::optional<PhiSample> zoom(LineObjective& obj, const WolfeParams& params,
                                       PhiSample lo, PhiSample hi,
                                       ObservationSet& observations,
                                       std::vector<TraceRecord>& trace) {
    const PhiSample s0 = obj.at_zero();
    const int start = obj.eval_count();
    std::vector<double> widths{std::abs(hi.alpha - lo.alpha)};
    while (obj.eval_count() - start < params.total_eval_budget) {
      const double a = std::min(lo.alpha, hi.alpha);
      const double b = std::max(lo.alpha, hi.alpha);
      const double w = b - a;
      if (w < 1e-12 * std::max(1.0, b)) break;
      const std::size_t done = widths.size() - 1;
      const bool force_bisect = done >= 2 && widths[done] > params.shrink * widths[done - 2];
      double t = 0.5 * (a + b);
      Phase phase = Phase::bisect;
      if (!force_bisect && std::isfinite(hi.phi)) {
        if (auto c = detail::cubic_minimizer(lo.alpha, lo.phi, lo.dphi, hi.alpha, hi.phi,
                                             hi.dphi)) {
          t = std::clamp(*c, a + 0.1 * w, b - 0.1 * w);
          phase = Phase::refine;
        }
      }
      PhiSample s;
      try {
        s = obj.eval(t);
      } catch (const non_finite_value&) {
        hi = PhiSample{t, std::numeric_limits<double>::infinity(), 0.0};
        widths.push_back(std::abs(hi.alpha - lo.alpha));
        continue;
      }
      observations.add(s);
      if (!sufficient_decrease(s0, s, params.mu) || s.phi >= lo.phi) {
        hi = s;
      } else {
        if (strong_wolfe(s0, s, params.mu, params.eta)) {
          detail::push_record(trace, phase, s, lo.alpha, hi.alpha);
          return s;
        }
        if (s.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = s;
      }
      widths.push_back(std::abs(hi.alpha - lo.alpha));
      detail::push_record(trace, phase, s, lo.alpha, hi.alpha);
    }
    return std::nullopt;
  }
};

inline LineSearchOutcome backtracking(LineObjective& obj, const WolfeParams& params) {
  return BacktrackingLineSearch{}(obj, params);
}

inline LineSearchOutcome bracketing_wolfe(LineObjective& obj, const WolfeParams& params) {
  return BracketingLineSearch{}(obj, params);
}

} // namespace bayesls
