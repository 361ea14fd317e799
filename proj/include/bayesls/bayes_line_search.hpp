#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "acquisition.hpp"
#include "errors.hpp"
#include "gp.hpp"
#include "kde.hpp"
#include "objective.hpp"
#include "outcome.hpp"
#include "wolfe.hpp"

namespace bayesls {

enum class PsiMode { use_psi, use_phi };

/// Search interval ordered by role. `lo` carries psi <= 0 and descends
/// toward `hi`; after a U3 update lo.alpha may exceed hi.alpha.
struct SearchInterval {
  PsiSample lo;
  PsiSample hi;
  bool certified = false;

  double left() const noexcept { return std::min(lo.alpha(), hi.alpha()); }
  double right() const noexcept { return std::max(lo.alpha(), hi.alpha()); }
  double width() const noexcept { return std::abs(hi.alpha() - lo.alpha()); }
  double midpoint() const noexcept { return 0.5 * (lo.alpha() + hi.alpha()); }
};

/// Which of the three nested-interval cases an update applied.
enum class UpdateCase { u1, u2, u3 };

struct BayesOptions {
  /// Exploration weight of the lower confidence bound.
  double kappa = 2.0;
  AcquisitionOptions acquisition{};
};

/// Upper bound on the number of expansions [lo, hi] -> [hi, min(c hi, alpha_max)]
/// before the interval is certified or reaches alpha_max, evaluated
/// literally as ceil((1/alpha0) * log_c(min(alpha_b, alpha_max))) with
/// alpha_b = (phi_min - phi0) / (mu * dphi0). Non-positive when the
/// logarithm's argument is below one.
inline long termination_bound(double phi0, double dphi0, double phi_min, double mu,
                              double c, double alpha0, double alpha_max) {
  const double alpha_b = (phi_min - phi0) / (mu * dphi0);
  const double arg = std::min(alpha_b, alpha_max);
  return static_cast<long>(std::ceil((1.0 / alpha0) * std::log(arg) / std::log(c)));
}

/// Same count measured as ceil(log_c(min(alpha_b, alpha_max) / alpha0)).
inline long termination_bound_log_ratio(double phi0, double dphi0, double phi_min,
                                        double mu, double c, double alpha0,
                                        double alpha_max) {
  const double alpha_b = (phi_min - phi0) / (mu * dphi0);
  const double arg = std::min(alpha_b, alpha_max) / alpha0;
  return static_cast<long>(std::ceil(std::log(arg) / std::log(c)));
}

namespace detail {

inline double aux_value(const PsiSample& s, PsiMode mode) noexcept {
  return mode == PsiMode::use_psi ? s.aux.psi : s.sample.phi;
}

inline double aux_slope(const PsiSample& s, PsiMode mode) noexcept {
  return mode == PsiMode::use_psi ? s.aux.dpsi : s.sample.dphi;
}

// Marker endpoint for a step where the objective was not finite.
inline PsiSample infinite_sample(double alpha) noexcept {
  const double inf = std::numeric_limits<double>::infinity();
  return {{alpha, inf, 0.0}, {inf, 0.0}};
}

} // namespace detail

/// Nested-interval update with trial step `t`:
///   U1: Psi(t) > Psi(lo)                      -> (lo, t)
///   U2: Psi(t) <= Psi(lo), Psi'(t)(lo - t) > 0 -> (t, hi)
///   U3: Psi(t) <= Psi(lo), Psi'(t)(lo - t) < 0 -> (t, lo)
inline SearchInterval update_interval(const SearchInterval& in, const PsiSample& t,
                                      PsiMode mode, UpdateCase* applied = nullptr) {
  using detail::aux_slope;
  using detail::aux_value;
  SearchInterval out;
  UpdateCase which;
  if (aux_value(t, mode) > aux_value(in.lo, mode)) {
    out.lo = in.lo;
    out.hi = t;
    which = UpdateCase::u1;
  } else if (aux_slope(t, mode) * (in.lo.alpha() - t.alpha()) > 0.0) {
    out.lo = t;
    out.hi = in.hi;
    which = UpdateCase::u2;
  } else {
    out.lo = t;
    out.hi = in.lo;
    which = UpdateCase::u3;
  }
  out.certified = certificate_holds_by_role(out.lo, out.hi);
  if (applied) *applied = which;
  return out;
}

/// Mutable state shared by the phases of one Bayesian line search.
struct SearchContext {
  LineObjective& obj;
  const WolfeParams& params;
  ObservationSet& observations;
  std::vector<TraceRecord>& trace;
  PsiMode mode = PsiMode::use_psi;

  PhiSample at_zero() const { return obj.at_zero(); }

  PsiSample aux(const PhiSample& s) const { return with_psi(obj.at_zero(), s, params.mu); }

  bool accepts(const PhiSample& s) const {
    return s.alpha > 0.0 && strong_wolfe(obj.at_zero(), s, params.mu, params.eta) &&
           s.phi <= observations.min_phi();
  }

  // Latches the switch to phi once a sufficient-decrease step has an
  // ascending slope.
  void note(const PhiSample& s) {
    observations.add(s);
    if (mode == PsiMode::use_psi && s.alpha > 0.0 && aux(s).aux.psi <= 0.0 && s.dphi > 0.0)
      mode = PsiMode::use_phi;
  }

  void record(Phase phase, const PhiSample& s, double lo, double hi, int gp_size,
              bool certified) {
    TraceRecord r;
    r.phase = phase;
    r.iteration = static_cast<int>(trace.size());
    r.alpha = s.alpha;
    r.phi = s.phi;
    r.dphi = s.dphi;
    r.lo = lo;
    r.hi = hi;
    r.gp_size = gp_size;
    r.certified = certified;
    r.uses_phi = mode == PsiMode::use_phi;
    trace.push_back(r);
  }
};

struct ExpansionResult {
  std::optional<SearchInterval> interval;
  /// Set when a probe already satisfies the strong Wolfe conditions and
  /// is the best step seen.
  std::optional<PhiSample> accepted;
  int expansions = 0;
  int evaluations = 0;
  /// Every probe failed to produce a finite value.
  bool eval_error = false;
};

/// Grows [0, alpha0] by the expansion factor until the interval is
/// certified or its upper end reaches alpha_max. A non-finite probe caps
/// the reachable step at the midpoint toward the lower end.
inline ExpansionResult expand_initial_interval(SearchContext& ctx) {
  ExpansionResult res;
  const int start = ctx.obj.eval_count();
  PsiSample lo = ctx.aux(ctx.at_zero());
  double cap = ctx.params.alpha_max;
  double step = ctx.params.first_step();
  int failures = 0;
  for (;;) {
    PhiSample s;
    try {
      s = ctx.obj.eval(step);
    } catch (const non_finite_value&) {
      if (++failures > 60) {
        res.eval_error = true;
        break;
      }
      cap = lo.alpha() + 0.5 * (step - lo.alpha());
      step = cap;
      continue;
    }
    ctx.note(s);
    const PsiSample hi = ctx.aux(s);
    const bool certified = certificate_holds(lo, hi);
    ctx.record(Phase::expand, s, lo.alpha(), step, 0, certified);
    if (ctx.accepts(s)) {
      res.accepted = s;
      break;
    }
    if (certified || step >= cap) {
      res.interval = SearchInterval{lo, hi, certified};
      break;
    }
    lo = hi;
    step = std::min(ctx.params.expansion * step, cap);
    ++res.expansions;
  }
  res.evaluations = ctx.obj.eval_count() - start;
  return res;
}

struct BayesPhaseResult {
  enum class Kind { found, proposal, exhausted };
  Kind kind = Kind::exhausted;
  PhiSample sample;
  int evaluations = 0;
  /// The acquisition could not propose a new interior step.
  bool degenerate = false;
  /// Step at which the objective was not finite, if any.
  std::optional<double> failed_step;
};

/// Bayesian optimization on the closed window of `interval`: condition a
/// Matern-5/2 GP (length scale = window width, constant prior mean = best
/// value in the window, values scaled by their spread in the window) on
/// the observations in the window, evaluate the
/// LCB maximizer, repeat. Stops on an accepted step or after
/// min(bo_budget, allowance) conditioning steps and then proposes the best
/// interior observation, or nothing if an endpoint is best.
inline BayesPhaseResult bayes_phase(SearchContext& ctx, const SearchInterval& interval,
                                    const BayesOptions& opt, int allowance) {
  BayesPhaseResult res;
  const double a = interval.left();
  const double b = interval.right();
  const double w = b - a;
  const int steps = std::max(0, std::min(ctx.params.bo_budget, allowance));

  auto best_in_window = [&]() -> std::optional<PhiSample> {
    std::optional<PhiSample> best;
    for (const auto& s : ctx.observations.within(a, b))
      if (!best || s.phi < best->phi) best = s;
    return best;
  };

  if (auto best = best_in_window(); best && ctx.accepts(*best)) {
    res.kind = BayesPhaseResult::Kind::found;
    res.sample = *best;
    return res;
  }

  for (int t = 0; t < steps; ++t) {
    const std::vector<PhiSample> window = ctx.observations.within(a, b);
    double mean = ctx.at_zero().phi;
    if (!window.empty()) {
      mean = window.front().phi;
      for (const auto& s : window) mean = std::min(mean, s.phi);
    }
    // The GP has unit prior variance, so values are measured in units of
    // their spread over the window. Otherwise the LCB is pure exploration
    // whenever phi varies by much less than one across the window.
    double spread = 0.0;
    for (const auto& s : window) spread = std::max(spread, std::abs(s.phi - mean));
    if (!(spread > 0.0))
      for (const auto& s : window) spread = std::max(spread, std::abs(s.dphi) * w);
    if (!(spread > 0.0) || !std::isfinite(spread)) spread = 1.0;
    std::vector<PhiSample> scaled;
    scaled.reserve(window.size());
    for (const auto& s : window)
      scaled.push_back({s.alpha, (s.phi - mean) / spread, s.dphi / spread});
    GpPrior prior{Matern52Kernel(w), 0.0, 0.0, 0.0};
    std::optional<GpPosterior> gp;
    try {
      gp = GpPosterior::condition(prior, scaled, w);
    } catch (const singular_kernel_matrix&) {
      res.degenerate = true;
      break;
    }
    const AcquisitionResult acq = maximize_acquisition(*gp, opt.kappa, a, b, opt.acquisition);
    const double x = acq.x;
    if (x - a <= 1e-8 * w || b - x <= 1e-8 * w || ctx.observations.has_near(x, 1e-12 * w)) {
      res.degenerate = true;
      break;
    }
    PhiSample s;
    try {
      s = ctx.obj.eval(x);
    } catch (const non_finite_value&) {
      ++res.evaluations;
      res.failed_step = x;
      return res;
    }
    ++res.evaluations;
    ctx.note(s);
    ctx.record(Phase::bayes_opt, s, interval.lo.alpha(), interval.hi.alpha(),
               static_cast<int>(gp->size()), interval.certified);
    if (ctx.accepts(s)) {
      res.kind = BayesPhaseResult::Kind::found;
      res.sample = s;
      return res;
    }
  }

  if (auto best = best_in_window(); best && best->alpha > a && best->alpha < b) {
    res.kind = BayesPhaseResult::Kind::proposal;
    res.sample = *best;
  }
  return res;
}

/// Strong-Wolfe line search by Bayesian optimization over a
/// gradient-conditioned Gaussian process, safeguarded by nested-interval
/// updates and forced bisection.
class BayesianLineSearch {
public:
  static constexpr const char* name = "bayes";

  explicit BayesianLineSearch(BayesOptions opt = {}) : opt_(opt) {}

  const BayesOptions& options() const noexcept { return opt_; }

  LineSearchOutcome operator()(LineObjective& obj, const WolfeParams& params) const {
    params.validate();
    if (!std::isfinite(params.alpha_max))
      throw invalid_parameter("the Bayesian line search needs a finite alpha_max");

    LineSearchOutcome out;
    ObservationSet observations;
    SearchContext ctx{obj, params, observations, out.trace};
    const int start = obj.eval_count();
    observations.add(obj.at_zero());

    auto finish = [&](const PhiSample& s, Status status) {
      out.alpha = s.alpha;
      out.sample = s;
      out.status = status;
      out.eval_count = obj.eval_count() - start;
      out.observations = observations.samples();
      return out;
    };

    const ExpansionResult expansion = expand_initial_interval(ctx);
    out.expansions = expansion.expansions;
    out.expansion_evals = expansion.evaluations;
    if (expansion.accepted) return finish(*expansion.accepted, Status::strong_wolfe);
    if (expansion.eval_error || !expansion.interval)
      return finish(obj.at_zero(), Status::eval_error);

    SearchInterval interval = *expansion.interval;
    const int phase_start = obj.eval_count();
    // widths[j] is the interval width after j refinements.
    std::vector<double> widths{interval.width()};

    auto used = [&] { return obj.eval_count() - phase_start; };

    for (int guard = 0; guard < 10000; ++guard) {
      if (used() >= params.total_eval_budget) break;
      // Relative to the interval's own right end: with alpha_max = 1e10 a
      // floor tied to alpha_max would stop every search with small steps.
      if (interval.width() < 1e-12 * std::max(1.0, interval.right())) break;

      const std::size_t done = widths.size() - 1;
      const bool force_bisect =
          done >= 2 && widths[done] > params.shrink * widths[done - 2];

      std::optional<PsiSample> trial;
      Phase phase = Phase::bisect;
      if (!force_bisect) {
        const BayesPhaseResult bo =
            bayes_phase(ctx, interval, opt_, params.total_eval_budget - used());
        if (bo.kind == BayesPhaseResult::Kind::found)
          return finish(bo.sample, Status::strong_wolfe);
        if (bo.failed_step) {
          trial = detail::infinite_sample(*bo.failed_step);
          phase = Phase::refine;
        } else if (bo.kind == BayesPhaseResult::Kind::proposal) {
          trial = ctx.aux(bo.sample);
          phase = Phase::refine;
        } else {
          std::vector<double> steps;
          for (const auto& s : observations.within(interval.left(), interval.right()))
            steps.push_back(s.alpha);
          try {
            const double x = densest_point(steps, interval.left(), interval.right());
            trial = ctx.aux(*observations.find(x));
            phase = Phase::kde_fallback;
          } catch (const no_interior_point&) {
          }
        }
      }

      if (!trial) {
        if (used() >= params.total_eval_budget) break;
        const double mid = interval.midpoint();
        try {
          const PhiSample s = obj.eval(mid);
          ctx.note(s);
          if (ctx.accepts(s)) {
            ctx.record(Phase::bisect, s, interval.lo.alpha(), interval.hi.alpha(), 0,
                       interval.certified);
            return finish(s, Status::strong_wolfe);
          }
          trial = ctx.aux(s);
        } catch (const non_finite_value&) {
          trial = detail::infinite_sample(mid);
        }
        phase = Phase::bisect;
      }

      interval = update_interval(interval, *trial, ctx.mode);
      widths.push_back(interval.width());
      ctx.record(phase, trial->sample, interval.lo.alpha(), interval.hi.alpha(), 0,
                 interval.certified);
    }

    auto [best, status] = select_fallback(observations, obj.at_zero(), params);
    if (status != Status::strong_wolfe && !interval.certified &&
        interval.right() == params.alpha_max) {
      if (auto s = observations.find(params.alpha_max))
        return finish(*s, Status::max_step_returned);
    }
    return finish(best, status);
  }

private:
  BayesOptions opt_;
};

/// Runs the Bayesian line search with the given options.
inline LineSearchOutcome line_search(LineObjective& obj, const WolfeParams& params,
                                     const BayesOptions& opt = {}) {
  return BayesianLineSearch(opt)(obj, params);
}

} // namespace bayesls
