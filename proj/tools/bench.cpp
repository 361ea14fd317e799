// Benchmark driver: runs L-BFGS with each line search over the problem
// registry and writes CSV reports.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bayesls/bench/suite.hpp"

namespace {

using namespace bayesls;
using namespace bayesls::bench;

struct Knobs {
  double kappa = 2.0;
  int bo_budget = 10;
  int direct_budget = 64;
  double expansion = 2.0;
  double shrink = 2.0 / 3.0;
  double mu = 1e-4;
  double eta = 0.9;
  int eval_budget = 40;
  double time_limit = 60.0;
  double tol_g = 1e-7;
  int max_iter = 5000;
  int memory = 10;
  int repeats = 1;
};

void add_knobs(CLI::App* app, Knobs& k) {
  app->add_option("--kappa", k.kappa, "LCB exploration weight")->capture_default_str();
  app->add_option("--bo-budget", k.bo_budget, "GP steps per Bayesian phase")->capture_default_str();
  app->add_option("--direct-budget", k.direct_budget, "acquisition evaluations per maximization")
      ->capture_default_str();
  app->add_option("--c", k.expansion, "interval expansion factor")->capture_default_str();
  app->add_option("--delta", k.shrink, "required shrink factor over two refinements")
      ->capture_default_str();
  app->add_option("--mu", k.mu, "sufficient-decrease constant")->capture_default_str();
  app->add_option("--eta", k.eta, "curvature constant")->capture_default_str();
  app->add_option("--eval-budget", k.eval_budget, "evaluations per line search after expansion")
      ->capture_default_str();
  app->add_option("--time-limit", k.time_limit, "seconds per solve")->capture_default_str();
  app->add_option("--tol-g", k.tol_g, "solver gradient tolerance")->capture_default_str();
  app->add_option("--max-iter", k.max_iter, "solver iteration limit")->capture_default_str();
  app->add_option("--memory", k.memory, "L-BFGS correction pairs")->capture_default_str();
  app->add_option("--repeats", k.repeats, "solves per run, fastest time kept")->capture_default_str();
}

SuiteConfig make_config(const Knobs& k) {
  SuiteConfig cfg;
  cfg.bayes.kappa = k.kappa;
  cfg.bayes.acquisition.budget = k.direct_budget;
  cfg.solve.line_search.mu = k.mu;
  cfg.solve.line_search.eta = k.eta;
  cfg.solve.line_search.expansion = k.expansion;
  cfg.solve.line_search.shrink = k.shrink;
  cfg.solve.line_search.bo_budget = k.bo_budget;
  cfg.solve.line_search.total_eval_budget = k.eval_budget;
  cfg.solve.line_search.validate();
  cfg.solve.time_limit = std::chrono::duration<double>(k.time_limit);
  cfg.solve.tol_g = k.tol_g;
  cfg.solve.max_iter = k.max_iter;
  cfg.solve.memory = k.memory;
  cfg.repeats = std::max(1, k.repeats);
  return cfg;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int run(const Knobs& k, const std::string& suite_name, const std::string& solvers,
        const std::string& out_dir, bool quiet) {
  SuiteConfig cfg = make_config(k);
  cfg.problems = suite(suite_name);
  cfg.solvers = split(solvers);
  const SuiteResult res = run_suite(cfg, [quiet](const RunRecord& r) {
    if (quiet) return;
    std::cerr << r.problem << " " << r.solver << " " << r.status << " f=" << r.report.f
              << " evals=" << r.report.evaluations << (r.solved() ? " solved" : "") << '\n';
  });
  write_suite(out_dir, res, cfg);
  for (const auto& row : summarize(res, cfg.solvers))
    std::cout << row.solver << ": solved " << row.solved << "/" << row.problems
              << " (f " << row.f_conv << ", g " << row.g_conv << "), median overhead "
              << row.median_overhead_ms << " ms/eval\n";
  return res.all_completed() ? 0 : 1;
}

int list() {
  for (const auto& p : registry()) {
    std::cout << p.name << " n=" << p.dimension() << (p.bounds ? " boxed" : "")
              << (p.convex ? " convex" : "");
    if (p.f_star) std::cout << " f*=" << *p.f_star;
    std::cout << '\n';
  }
  std::cout << "suites:";
  for (const auto& s : suite_names()) std::cout << ' ' << s;
  std::cout << '\n';
  return 0;
}

// One CSV of every line-search record of one solve, tagged by search index.
int trace(const Knobs& k, const std::string& problem, const std::string& solver,
          const std::string& out_file) {
  auto p = find_problem(problem);
  if (!p) throw invalid_parameter("unknown problem: " + problem);
  SuiteConfig cfg = make_config(k);
  SolveOptions opt = cfg.solve;
  opt.bounds = p->bounds;
  std::ofstream os(out_file);
  if (!os) throw error("cannot write " + out_file);
  os << "search," << kTraceHeader << '\n';
  int search = 0;
  opt.on_line_search = [&](const Vector&, const Vector&, const LineSearchOutcome& out) {
    for (const auto& r : out.trace) os << search << ',' << trace_row(r) << '\n';
    ++search;
  };
  const SolveReport rep = solve(p->objective, p->x0, make_line_search(solver, cfg.bayes), opt);
  std::cout << to_string(rep.status) << " f=" << rep.f << " evals=" << rep.evaluations
            << " searches=" << search << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Line-search benchmark over a registry of test problems"};
  app.require_subcommand(1);

  Knobs knobs;
  std::string suite_name = "all", solvers = "bayes,backtracking,bracketing", out_dir = "bench_out";
  bool quiet = false;
  auto* run_cmd = app.add_subcommand("run", "run a suite and write runs/curves/summary CSVs");
  run_cmd->add_option("--suite", suite_name, "problem suite")->capture_default_str();
  run_cmd->add_option("--solvers", solvers, "comma-separated line searches")->capture_default_str();
  run_cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
  run_cmd->add_flag("--quiet", quiet, "no per-run progress");
  add_knobs(run_cmd, knobs);

  auto* list_cmd = app.add_subcommand("list", "list registered problems and suites");

  std::string problem, solver = "bayes", out_file = "trace.csv";
  auto* trace_cmd = app.add_subcommand("trace", "write line-search traces of one solve");
  trace_cmd->add_option("--problem", problem, "problem name")->required();
  trace_cmd->add_option("--solver", solver, "line search")->capture_default_str();
  trace_cmd->add_option("--out", out_file, "output CSV")->capture_default_str();
  add_knobs(trace_cmd, knobs);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(knobs, suite_name, solvers, out_dir, quiet);
    if (*list_cmd) return list();
    if (*trace_cmd) return trace(knobs, problem, solver, out_file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
