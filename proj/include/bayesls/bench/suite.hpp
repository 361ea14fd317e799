#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "../baselines.hpp"
#include "../bayes_line_search.hpp"
#include "../lbfgs.hpp"
#include "metrics.hpp"
#include "problems.hpp"

namespace bayesls::bench {

using bayesls::detail::format_double;

using LineSearchFn = std::function<LineSearchOutcome(LineObjective&, const WolfeParams&)>;

inline std::vector<std::string> solver_ids() { return {"bayes", "backtracking", "bracketing"}; }

inline LineSearchFn make_line_search(const std::string& id, const BayesOptions& bayes = {}) {
  if (id == "bayes") return BayesianLineSearch(bayes);
  if (id == "backtracking") return BacktrackingLineSearch{};
  if (id == "bracketing") return BracketingLineSearch{};
  throw invalid_parameter("unknown solver: " + id);
}

struct SuiteConfig {
  std::vector<Problem> problems;
  std::vector<std::string> solvers = solver_ids();
  SolveOptions solve{};
  BayesOptions bayes{};
  /// Evaluations timed per problem to estimate the mean evaluation cost.
  int timing_evals = 1000;
  /// Each solve is repeated this many times and the fastest wall time is
  /// kept; the solves are deterministic, so only the timing differs.
  int repeats = 1;
};

struct RunRecord {
  std::string problem;
  std::string solver;
  /// Solver status, or "error" when the run threw.
  std::string status;
  std::string message;
  SolveReport report;
  double f_star = 0.0;
  bool f_star_known = false;
  bool converged_f = false;
  bool converged_g = false;
  double t_eval_s = 0.0;
  double overhead_ms = 0.0;

  bool completed() const { return status != "error"; }
  bool solved() const { return completed() && (converged_f || converged_g); }
};

struct SuiteResult {
  std::vector<RunRecord> runs;
  /// Per problem, the evaluation index used to scale the curve x-axis.
  std::map<std::string, std::size_t> discovery;

  bool all_completed() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.completed(); });
  }
};

/// Mean wall time of one evaluation at x0, in seconds.
inline double expected_eval_time(const Problem& p, int n) {
  using clock = std::chrono::steady_clock;
  volatile double sink = 0.0;
  const auto t0 = clock::now();
  for (int i = 0; i < n; ++i) sink = sink + p.objective(p.x0).value;
  const double t = std::chrono::duration<double>(clock::now() - t0).count();
  return n > 0 ? t / n : 0.0;
}

namespace detail {

// Clips the final iterate into the box and recomputes value and gradient
// from the objective itself, so nothing reported by the solver is trusted.
inline void finalize(const Problem& p, SolveReport& rep) {
  if (p.bounds && !p.bounds->contains(rep.x)) rep.x = p.bounds->clip(rep.x);
  const Evaluation e = p.objective(rep.x);
  rep.f = e.value;
  rep.g_inf = e.gradient.lpNorm<Eigen::Infinity>();
  rep.pg_inf = bayesls::detail::projected_gradient_inf(rep.x, e.gradient, p.bounds);
}

} // namespace detail

inline RunRecord run_one(const Problem& p, const std::string& solver, const SuiteConfig& cfg,
                         double t_eval_s) {
  RunRecord r{p.name, solver, "error", "", {}};
  r.t_eval_s = t_eval_s;
  try {
    SolveOptions opt = cfg.solve;
    opt.bounds = p.bounds;
    const LineSearchFn ls = make_line_search(solver, cfg.bayes);
    r.report = solve(p.objective, p.x0, ls, opt);
    for (int k = 1; k < cfg.repeats; ++k)
      r.report.wall_time_s = std::min(r.report.wall_time_s, solve(p.objective, p.x0, ls, opt).wall_time_s);
    detail::finalize(p, r.report);
    r.status = std::string(to_string(r.report.status));
    if (r.report.evaluations > 0)
      r.overhead_ms =
          1e3 * overhead_per_eval(r.report.wall_time_s, r.report.evaluations, t_eval_s);
  } catch (const std::exception& e) {
    r.status = "error";
    r.message = e.what();
  }
  return r;
}

/// Runs every problem against every solver sequentially, then fills in f*,
/// convergence flags and curve scaling per problem.
inline SuiteResult run_suite(const SuiteConfig& cfg,
                             const std::function<void(const RunRecord&)>& progress = {}) {
  for (const auto& s : cfg.solvers) make_line_search(s, cfg.bayes);
  SuiteResult out;
  for (const auto& p : cfg.problems) {
    const double t_eval = expected_eval_time(p, cfg.timing_evals);
    std::vector<RunRecord> runs;
    for (const auto& s : cfg.solvers) runs.push_back(run_one(p, s, cfg, t_eval));

    double f_star = std::numeric_limits<double>::infinity();
    const bool known = p.f_star.has_value();
    if (known) {
      f_star = *p.f_star;
    } else {
      for (const auto& r : runs)
        if (r.completed()) f_star = std::min(f_star, r.report.f);
    }
    std::size_t discovery = std::numeric_limits<std::size_t>::max();
    for (auto& r : runs) {
      r.f_star = f_star;
      r.f_star_known = known;
      if (!r.completed() || !std::isfinite(f_star)) continue;
      r.converged_f = converged_f(r.report.f, f_star);
      // With a box the projected gradient stands in for the gradient.
      r.converged_g = converged_g(r.report.pg_inf, r.report.f);
      discovery = std::min(discovery, discovery_index(r.report.eval_history, f_star));
    }
    out.discovery[p.name] = discovery == std::numeric_limits<std::size_t>::max() ? 0 : discovery;
    for (auto& r : runs) {
      if (progress) progress(r);
      out.runs.push_back(std::move(r));
    }
  }
  return out;
}

inline constexpr std::string_view kRunsHeader =
    "problem,solver,status,message,dimension,f,g_inf,pg_inf,f_star,f_star_known,converged_f,"
    "converged_g,evaluations,line_search_evaluations,iterations,skipped_pairs,wall_time_s,"
    "t_eval_s,overhead_ms";

inline constexpr std::string_view kCurvesHeader =
    "problem,solver,eval,normalized_evals,normalized_distance,degenerate";

inline constexpr std::string_view kSummaryHeader =
    "solver,problems,completed,f_conv,g_conv,solved,median_evaluations,median_overhead_ms";

namespace detail {

inline std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

} // namespace detail

inline void write_runs_csv(std::ostream& os, const SuiteResult& res,
                           const std::vector<Problem>& problems) {
  std::map<std::string, Eigen::Index> dims;
  for (const auto& p : problems) dims[p.name] = p.dimension();
  os << kRunsHeader << '\n';
  for (const auto& r : res.runs) {
    const auto& rep = r.report;
    os << r.problem << ',' << r.solver << ',' << r.status << ',' << detail::csv_field(r.message)
       << ',' << dims[r.problem] << ',' << format_double(rep.f) << ','
       << format_double(rep.g_inf) << ',' << format_double(rep.pg_inf) << ','
       << format_double(r.f_star) << ',' << int(r.f_star_known) << ',' << int(r.converged_f)
       << ',' << int(r.converged_g) << ',' << rep.evaluations << ','
       << rep.line_search_evaluations << ',' << rep.iterations << ',' << rep.skipped_pairs << ','
       << format_double(rep.wall_time_s) << ',' << format_double(r.t_eval_s) << ','
       << format_double(r.overhead_ms) << '\n';
  }
}

inline void write_curves_csv(std::ostream& os, const SuiteResult& res) {
  os << kCurvesHeader << '\n';
  for (const auto& r : res.runs) {
    if (!r.completed() || !std::isfinite(r.f_star)) continue;
    const Curve c =
        normalized_eval_curve(r.report.eval_history, r.f_star, res.discovery.at(r.problem));
    for (std::size_t k = 0; k < c.points.size(); ++k)
      os << r.problem << ',' << r.solver << ',' << k << ',' << format_double(c.points[k].evals)
         << ',' << format_double(c.points[k].distance) << ',' << int(c.degenerate) << '\n';
  }
}

struct SummaryRow {
  std::string solver;
  int problems = 0;
  int completed = 0;
  int f_conv = 0;
  int g_conv = 0;
  int solved = 0;
  double median_evaluations = 0.0;
  double median_overhead_ms = 0.0;
};

inline std::vector<SummaryRow> summarize(const SuiteResult& res,
                                         const std::vector<std::string>& solvers) {
  std::vector<SummaryRow> rows;
  for (const auto& s : solvers) {
    SummaryRow row{s};
    std::vector<double> evals, overhead;
    for (const auto& r : res.runs) {
      if (r.solver != s) continue;
      ++row.problems;
      if (!r.completed()) continue;
      ++row.completed;
      row.f_conv += r.converged_f;
      row.g_conv += r.converged_g;
      row.solved += r.solved();
      evals.push_back(r.report.evaluations);
      overhead.push_back(r.overhead_ms);
    }
    row.median_evaluations = median(evals);
    row.median_overhead_ms = median(overhead);
    rows.push_back(row);
  }
  return rows;
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryHeader << '\n';
  for (const auto& r : rows)
    os << r.solver << ',' << r.problems << ',' << r.completed << ',' << r.f_conv << ','
       << r.g_conv << ',' << r.solved << ',' << format_double(r.median_evaluations) << ','
       << format_double(r.median_overhead_ms) << '\n';
}

/// Writes runs.csv, curves.csv and summary.csv into `dir`.
inline void write_suite(const std::filesystem::path& dir, const SuiteResult& res,
                        const SuiteConfig& cfg) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("runs.csv");
    write_runs_csv(f, res, cfg.problems);
  }
  {
    auto f = open("curves.csv");
    write_curves_csv(f, res);
  }
  {
    auto f = open("summary.csv");
    write_summary_csv(f, summarize(res, cfg.solvers));
  }
}

} // namespace bayesls::bench
