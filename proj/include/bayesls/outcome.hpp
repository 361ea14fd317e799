#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "wolfe.hpp"

namespace bayesls {

enum class Status {
  strong_wolfe,
  /// Backtracking accepts on the Armijo rule alone.
  sufficient_decrease,
  max_step_returned,
  budget_exhausted,
  eval_error,
};

enum class Phase { expand, bayes_opt, refine, bisect, kde_fallback };

inline std::string_view to_string(Status s) noexcept {
  switch (s) {
  case Status::strong_wolfe: return "strong_wolfe";
  case Status::sufficient_decrease: return "sufficient_decrease";
  case Status::max_step_returned: return "max_step_returned";
  case Status::budget_exhausted: return "budget_exhausted";
  case Status::eval_error: return "eval_error";
  }
  return "unknown";
}

inline std::string_view to_string(Phase p) noexcept {
  switch (p) {
  case Phase::expand: return "expand";
  case Phase::bayes_opt: return "bayes_opt";
  case Phase::refine: return "refine";
  case Phase::bisect: return "bisect";
  case Phase::kde_fallback: return "kde_fallback";
  }
  return "unknown";
}

/// True for records that shrink the search interval.
inline bool is_refinement(Phase p) noexcept {
  return p == Phase::refine || p == Phase::bisect || p == Phase::kde_fallback;
}

struct TraceRecord {
  Phase phase = Phase::expand;
  int iteration = 0;
  double alpha = 0.0;
  double phi = 0.0;
  double dphi = 0.0;
  /// Interval endpoints by role: `lo` is the endpoint with the smaller
  /// auxiliary value, which may lie to the right of `hi`.
  double lo = 0.0;
  double hi = 0.0;
  int gp_size = 0;
  /// Certificate state of (lo, hi) after this record.
  bool certified = false;
  /// Interval updates compare phi instead of psi.
  bool uses_phi = false;
};

/// All steps evaluated during one line search, ordered by step.
class ObservationSet {
public:
  /// Adds a sample; a repeated step is ignored.
  void add(const PhiSample& s) {
    auto it = std::lower_bound(samples_.begin(), samples_.end(), s.alpha,
                               [](const PhiSample& a, double x) { return a.alpha < x; });
    if (it != samples_.end() && it->alpha == s.alpha) return;
    samples_.insert(it, s);
  }

  const std::vector<PhiSample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  /// Samples with a <= alpha <= b (bounds in either order).
  std::vector<PhiSample> within(double a, double b) const {
    if (a > b) std::swap(a, b);
    std::vector<PhiSample> out;
    for (const auto& s : samples_)
      if (s.alpha >= a && s.alpha <= b) out.push_back(s);
    return out;
  }

  std::optional<PhiSample> find(double alpha) const {
    for (const auto& s : samples_)
      if (s.alpha == alpha) return s;
    return std::nullopt;
  }

  bool has_near(double x, double tol) const {
    return std::any_of(samples_.begin(), samples_.end(),
                       [&](const PhiSample& s) { return std::abs(s.alpha - x) <= tol; });
  }

  double min_phi() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : samples_) m = std::min(m, s.phi);
    return m;
  }

private:
  std::vector<PhiSample> samples_;
};

struct LineSearchOutcome {
  double alpha = 0.0;
  Status status = Status::eval_error;
  /// Objective evaluations made by this search.
  int eval_count = 0;
  /// Evaluations spent locating the initial interval.
  int expansion_evals = 0;
  /// Number of interval updates during the expansion.
  int expansions = 0;
  PhiSample sample;
  std::vector<TraceRecord> trace;
  std::vector<PhiSample> observations;
};

/// Step returned when a search stops without an early acceptance:
/// the best strong-Wolfe step, else the best sufficient-decrease step,
/// else the best step below phi(0), else the step with the smallest |psi|.
inline std::pair<PhiSample, Status> select_fallback(const ObservationSet& obs,
                                                    const PhiSample& at_zero,
                                                    const WolfeParams& params) {
  const PhiSample* best_wolfe = nullptr;
  const PhiSample* best_sd = nullptr;
  const PhiSample* best_phi = nullptr;
  const PhiSample* best_psi = nullptr;
  for (const auto& s : obs.samples()) {
    if (!(s.alpha > 0.0)) continue;
    if (strong_wolfe(at_zero, s, params.mu, params.eta) &&
        (!best_wolfe || s.phi < best_wolfe->phi))
      best_wolfe = &s;
    if (sufficient_decrease(at_zero, s, params.mu) && (!best_sd || s.phi < best_sd->phi))
      best_sd = &s;
    if (s.phi < at_zero.phi && (!best_phi || s.phi < best_phi->phi)) best_phi = &s;
    if (!best_psi || std::abs(psi(at_zero, s, params.mu).psi) <
                         std::abs(psi(at_zero, *best_psi, params.mu).psi))
      best_psi = &s;
  }
  if (best_wolfe) return {*best_wolfe, Status::strong_wolfe};
  if (best_sd) return {*best_sd, Status::budget_exhausted};
  if (best_phi) return {*best_phi, Status::budget_exhausted};
  if (best_psi) return {*best_psi, Status::budget_exhausted};
  return {at_zero, Status::budget_exhausted};
}

namespace detail {
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
} // namespace detail

inline constexpr std::string_view kTraceHeader = "phase,iteration,alpha,phi,dphi,lo,hi,gp_size";

/// One CSV row in the trace format (no trailing newline).
inline std::string trace_row(const TraceRecord& r) {
  using detail::format_double;
  std::string row(to_string(r.phase));
  row += ',' + std::to_string(r.iteration);
  row += ',' + format_double(r.alpha);
  row += ',' + format_double(r.phi);
  row += ',' + format_double(r.dphi);
  row += ',' + format_double(r.lo);
  row += ',' + format_double(r.hi);
  row += ',' + std::to_string(r.gp_size);
  return row;
}

/// Writes the header row followed by one row per record.
inline void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace) {
  os << kTraceHeader << '\n';
  for (const auto& r : trace) os << trace_row(r) << '\n';
}

} // namespace bayesls
