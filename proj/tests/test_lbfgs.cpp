#include <gtest/gtest.h>

#include <cmath>

#include "bayesls/baselines.hpp"
#include "bayesls/bayes_line_search.hpp"
#include "bayesls/bench/problems.hpp"
#include "bayesls/lbfgs.hpp"

using namespace bayesls;

namespace {

MultivariateObjective spd_quadratic() {
  Eigen::Matrix2d a;
  a << 3, 1, 1, 2;
  return MultivariateObjective(2, [a](const Vector& z) {
    return Evaluation{0.5 * z.dot(a * z), a * z};
  });
}

} // namespace

TEST(Lbfgs, ConvexQuadraticTwoDimensions) {
  SolveOptions opt;
  opt.tol_g = 1e-10;
  const auto rep = solve(spd_quadratic(), Vector::Ones(2), BayesianLineSearch{}, opt);
  EXPECT_EQ(rep.status, SolveStatus::converged);
  EXPECT_LT(rep.g_inf, 1e-10);
  EXPECT_LE(rep.iterations, 10);
}

TEST(Lbfgs, RosenbrockFromStandardStart) {
  const auto p = *bench::find_problem("rosenbrock_2");
  const auto rep = solve(p.objective, p.x0, BayesianLineSearch{});
  EXPECT_EQ(rep.status, SolveStatus::converged);
  EXPECT_LT((rep.x - Vector::Ones(2)).lpNorm<Eigen::Infinity>(), 1e-5);
}

TEST(Lbfgs, OptimalStartReturnsImmediately) {
  const auto rep = solve(spd_quadratic(), Vector::Zero(2), BayesianLineSearch{});
  EXPECT_EQ(rep.status, SolveStatus::converged);
  EXPECT_EQ(rep.iterations, 0);
  EXPECT_EQ(rep.evaluations, 1);
}

TEST(Lbfgs, InvariantsAcrossRegistry) {
  for (const auto& p : bench::registry()) {
    for (int which = 0; which < 3; ++which) {
      SolveOptions opt;
      opt.bounds = p.bounds;
      opt.max_iter = 300;
      double prev_f = p.objective(p.x0).value;
      bool descent_ok = true, direction_ok = true;
      opt.on_line_search = [&](const Vector& x, const Vector& d, const LineSearchOutcome&) {
        direction_ok &= d.dot(p.objective(x).gradient) < 0.0;
      };
      SolveReport rep;
      if (which == 0) rep = solve(p.objective, p.x0, BayesianLineSearch{}, opt);
      if (which == 1) rep = solve(p.objective, p.x0, BacktrackingLineSearch{}, opt);
      if (which == 2) rep = solve(p.objective, p.x0, BracketingLineSearch{}, opt);
      for (const auto& r : rep.records) {
        descent_ok &= r.f < prev_f;
        prev_f = r.f;
      }
      EXPECT_TRUE(descent_ok) << p.name << " " << which;
      EXPECT_TRUE(direction_ok) << p.name << " " << which;
      EXPECT_EQ(rep.evaluations, rep.line_search_evaluations + rep.other_evaluations) << p.name;
      EXPECT_EQ(static_cast<std::size_t>(rep.evaluations), rep.eval_history.size());
      if (p.bounds) { EXPECT_TRUE(p.bounds->contains(rep.x)) << p.name; }
    }
  }
}

TEST(Lbfgs, StoredPairsHavePositiveCurvature) {
  // Reconstruct pairs from accepted strong-Wolfe steps.
  const auto p = *bench::find_problem("wood");
  SolveOptions opt;
  int checked = 0;
  opt.on_line_search = [&](const Vector& x, const Vector& d, const LineSearchOutcome& out) {
    if (out.status != Status::strong_wolfe) return;
    const Vector s = out.alpha * d;
    const Vector y = p.objective(x + s).gradient - p.objective(x).gradient;
    EXPECT_GT(s.dot(y), 0.0);
    ++checked;
  };
  solve(p.objective, p.x0, BayesianLineSearch{}, opt);
  EXPECT_GT(checked, 10);
}

TEST(Lbfgs, LimitsAndValidation) {
  const auto p = *bench::find_problem("rosenbrock_10");
  SolveOptions opt;
  opt.max_iter = 3;
  EXPECT_EQ(solve(p.objective, p.x0, BracketingLineSearch{}, opt).status, SolveStatus::max_iterations);
  opt.max_iter = 5000;
  opt.time_limit = std::chrono::duration<double>(0.0);
  EXPECT_EQ(solve(p.objective, p.x0, BracketingLineSearch{}, opt).status, SolveStatus::time_limit);
  EXPECT_THROW(solve(p.objective, Vector::Zero(3), BracketingLineSearch{}), dimension_mismatch);
  SolveOptions boxed;
  boxed.bounds = Bounds{Vector::Constant(10, 0.0), Vector::Constant(10, 1.0)};
  EXPECT_THROW(solve(p.objective, p.x0, BracketingLineSearch{}, boxed), invalid_parameter);
}

TEST(Lbfgs, LineSearchFailureAfterSteepestRetry) {
  // A line search that never makes progress.
  int calls = 0;
  auto stuck = [&](LineObjective& obj, const WolfeParams&) {
    ++calls;
    LineSearchOutcome out;
    out.alpha = 0.0;
    out.sample = obj.at_zero();
    out.status = Status::budget_exhausted;
    return out;
  };
  const auto p = *bench::find_problem("beale");
  const auto rep = solve(p.objective, p.x0, stuck);
  EXPECT_EQ(rep.status, SolveStatus::line_search_failure);
  EXPECT_EQ(calls, 1); // no pairs yet: the first attempt already was steepest descent
}

TEST(Lbfgs, BoundedAlphaMaxFromRatioTest) {
  const auto p = *bench::find_problem("boxed_sphere_10");
  SolveOptions opt;
  opt.bounds = p.bounds;
  const auto rep = solve(p.objective, p.x0, BayesianLineSearch{}, opt);
  EXPECT_EQ(rep.status, SolveStatus::converged);
  EXPECT_NEAR(rep.f, 10.0, 1e-12);
  EXPECT_TRUE((rep.x.array() == 1.0).all());
}
