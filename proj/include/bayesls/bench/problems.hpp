#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "../lbfgs.hpp"
#include "../objective.hpp"

namespace bayesls::bench {

struct Problem {
  std::string name;
  MultivariateObjective objective;
  Vector x0;
  std::optional<Bounds> bounds;
  /// Analytic optimal value over the feasible set, when known.
  std::optional<double> f_star;
  /// Strict lower bound of f on all of R^n.
  std::optional<double> lower_bound;
  bool convex = false;

  Eigen::Index dimension() const { return objective.dimension(); }
};

namespace functions {

/// Chained Rosenbrock, sum 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2.
inline Evaluation rosenbrock(const Vector& x) {
  const Eigen::Index n = x.size();
  Evaluation e{0.0, Vector::Zero(n)};
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double a = x(i + 1) - x(i) * x(i);
    const double b = 1.0 - x(i);
    e.value += 100.0 * a * a + b * b;
    e.gradient(i) += -400.0 * a * x(i) - 2.0 * b;
    e.gradient(i + 1) += 200.0 * a;
  }
  return e;
}

/// Extended Rosenbrock: independent pairs (x_{2i-1}, x_{2i}).
inline Evaluation extended_rosenbrock(const Vector& x) {
  const Eigen::Index n = x.size();
  Evaluation e{0.0, Vector::Zero(n)};
  for (Eigen::Index i = 0; i + 1 < n; i += 2) {
    const double a = x(i + 1) - x(i) * x(i);
    const double b = 1.0 - x(i);
    e.value += 100.0 * a * a + b * b;
    e.gradient(i) = -400.0 * a * x(i) - 2.0 * b;
    e.gradient(i + 1) = 200.0 * a;
  }
  return e;
}

/// 0.5 * sum w_i (x_i - c)^2.
inline Evaluation weighted_quadratic(const Vector& x, const Vector& w, double c) {
  const Vector d = x.array() - c;
  return {0.5 * (w.array() * d.array().square()).sum(), (w.array() * d.array()).matrix()};
}

/// Eigenvalues geometrically spaced between 1 and `condition`.
inline Vector log_spaced(Eigen::Index n, double condition) {
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i)
    w(i) = std::pow(condition, n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0);
  return w;
}

inline Evaluation beale(const Vector& v) {
  const double x = v(0), y = v(1);
  const double t1 = 1.5 - x + x * y;
  const double t2 = 2.25 - x + x * y * y;
  const double t3 = 2.625 - x + x * y * y * y;
  Evaluation e{t1 * t1 + t2 * t2 + t3 * t3, Vector(2)};
  e.gradient(0) = 2.0 * t1 * (y - 1.0) + 2.0 * t2 * (y * y - 1.0) + 2.0 * t3 * (y * y * y - 1.0);
  e.gradient(1) = 2.0 * t1 * x + 2.0 * t2 * 2.0 * x * y + 2.0 * t3 * 3.0 * x * y * y;
  return e;
}

inline Evaluation himmelblau(const Vector& v) {
  const double x = v(0), y = v(1);
  const double a = x * x + y - 11.0;
  const double b = x + y * y - 7.0;
  Evaluation e{a * a + b * b, Vector(2)};
  e.gradient(0) = 4.0 * a * x + 2.0 * b;
  e.gradient(1) = 2.0 * a + 4.0 * b * y;
  return e;
}

inline Evaluation powell_singular(const Vector& v) {
  const double a = v(0) + 10.0 * v(1);
  const double b = v(2) - v(3);
  const double c = v(1) - 2.0 * v(2);
  const double d = v(0) - v(3);
  Evaluation e{a * a + 5.0 * b * b + std::pow(c, 4) + 10.0 * std::pow(d, 4), Vector(4)};
  e.gradient(0) = 2.0 * a + 40.0 * d * d * d;
  e.gradient(1) = 20.0 * a + 4.0 * c * c * c;
  e.gradient(2) = 10.0 * b - 8.0 * c * c * c;
  e.gradient(3) = -10.0 * b - 40.0 * d * d * d;
  return e;
}

inline Evaluation wood(const Vector& v) {
  const double x1 = v(0), x2 = v(1), x3 = v(2), x4 = v(3);
  const double a = x2 - x1 * x1;
  const double b = x4 - x3 * x3;
  Evaluation e{100.0 * a * a + (1 - x1) * (1 - x1) + 90.0 * b * b + (1 - x3) * (1 - x3) +
                   10.1 * ((x2 - 1) * (x2 - 1) + (x4 - 1) * (x4 - 1)) +
                   19.8 * (x2 - 1) * (x4 - 1),
               Vector(4)};
  e.gradient(0) = -400.0 * a * x1 - 2.0 * (1 - x1);
  e.gradient(1) = 200.0 * a + 20.2 * (x2 - 1) + 19.8 * (x4 - 1);
  e.gradient(2) = -360.0 * b * x3 - 2.0 * (1 - x3);
  e.gradient(3) = 180.0 * b + 20.2 * (x4 - 1) + 19.8 * (x2 - 1);
  return e;
}

/// Trigonometric function, residuals
/// r_i = n - sum_j cos x_j + i (1 - cos x_i) - sin x_i.
inline Evaluation trigonometric(const Vector& x) {
  const Eigen::Index n = x.size();
  const double cos_sum = x.array().cos().sum();
  Vector r(n);
  for (Eigen::Index i = 0; i < n; ++i)
    r(i) = static_cast<double>(n) - cos_sum + static_cast<double>(i + 1) * (1.0 - std::cos(x(i))) -
           std::sin(x(i));
  const double r_sum = r.sum();
  Evaluation e{r.squaredNorm(), Vector(n)};
  for (Eigen::Index j = 0; j < n; ++j)
    e.gradient(j) = 2.0 * std::sin(x(j)) * r_sum +
                    2.0 * r(j) * (static_cast<double>(j + 1) * std::sin(x(j)) - std::cos(x(j)));
  return e;
}

} // namespace functions

namespace detail {

inline Vector alternating_start(Eigen::Index n) {
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = i % 2 == 0 ? -1.2 : 1.0;
  return x;
}

inline Bounds box(Eigen::Index n, double lo, double hi) {
  return {Vector::Constant(n, lo), Vector::Constant(n, hi)};
}

inline std::string condition_tag(double c) {
  return "1e" + std::to_string(static_cast<int>(std::lround(std::log10(c))));
}

} // namespace detail

/// Desk-scale registry of smooth test problems, some with box bounds.
inline std::vector<Problem> registry() {
  using namespace functions;
  std::vector<Problem> out;

  for (Eigen::Index n : {2, 10, 100})
    out.push_back({"rosenbrock_" + std::to_string(n), MultivariateObjective(n, rosenbrock),
                   detail::alternating_start(n), std::nullopt, 0.0, -1e-9, false});
  out.push_back({"ext_rosenbrock_10", MultivariateObjective(10, extended_rosenbrock),
                 detail::alternating_start(10), std::nullopt, 0.0, -1e-9, false});

  {
    const Vector w = Vector::Constant(10, 2.0);
    Vector x0(10);
    for (Eigen::Index i = 0; i < 10; ++i) x0(i) = static_cast<double>(i + 1);
    out.push_back({"sphere_10",
                   MultivariateObjective(10, [w](const Vector& x) { return weighted_quadratic(x, w, 0.0); }),
                   x0, std::nullopt, 0.0, -1e-9, true});
  }
  for (double cond : {1e2, 1e4, 1e6}) {
    const Vector w = log_spaced(10, cond);
    out.push_back({"quadratic_" + detail::condition_tag(cond) + "_10",
                   MultivariateObjective(10, [w](const Vector& x) { return weighted_quadratic(x, w, 0.0); }),
                   Vector::Ones(10), std::nullopt, 0.0, -1e-9, true});
  }
  out.push_back({"beale", MultivariateObjective(2, beale), Vector::Ones(2), std::nullopt, 0.0,
                 -1e-9, false});
  out.push_back({"himmelblau", MultivariateObjective(2, himmelblau), Vector::Zero(2),
                 std::nullopt, 0.0, -1e-9, false});
  {
    Vector x0(4);
    x0 << 3.0, -1.0, 0.0, 1.0;
    out.push_back({"powell_singular", MultivariateObjective(4, powell_singular), x0,
                   std::nullopt, 0.0, -1e-9, false});
  }
  {
    Vector x0(4);
    x0 << -3.0, -1.0, -3.0, -1.0;
    out.push_back({"wood", MultivariateObjective(4, wood), x0, std::nullopt, 0.0, -1e-9, false});
  }
  out.push_back({"trigonometric_10", MultivariateObjective(10, trigonometric),
                 Vector::Constant(10, 0.1), std::nullopt, 0.0, -1e-9, false});

  // Boxed variants.
  {
    Bounds b{Vector(2), Vector(2)};
    b.lower << -2.0, -2.0;
    b.upper << 0.5, 2.0;
    Vector x0(2);
    x0 << -1.2, 1.0;
    // x2 = x1^2 and x1 as close to 1 as allowed: (0.5, 0.25), f = 0.25.
    out.push_back({"boxed_rosenbrock_2", MultivariateObjective(2, rosenbrock), x0, b, 0.25,
                   -1e-9, false});
  }
  {
    const Vector w = Vector::Constant(10, 2.0);
    out.push_back({"boxed_sphere_10",
                   MultivariateObjective(10, [w](const Vector& x) { return weighted_quadratic(x, w, 2.0); }),
                   Vector::Zero(10), detail::box(10, -1.0, 1.0), 10.0, -1e-9, true});
  }
  {
    const Vector w = log_spaced(10, 1e4);
    out.push_back({"boxed_quadratic_1e4_10",
                   MultivariateObjective(10, [w](const Vector& x) { return weighted_quadratic(x, w, 2.0); }),
                   Vector::Zero(10), detail::box(10, -1.0, 1.0), 0.5 * w.sum(), -1e-9, true});
  }
  {
    Bounds b{Vector(2), Vector(2)};
    b.lower << 0.0, 0.0;
    b.upper << 2.5, 1.0;
    out.push_back({"boxed_beale", MultivariateObjective(2, beale), Vector::Ones(2), b,
                   std::nullopt, -1e-9, false});
  }
  return out;
}

inline std::vector<std::string> suite_names() {
  return {"all", "unconstrained", "bound", "convex", "small"};
}

/// Problems of a named suite; throws invalid_parameter for unknown names.
inline std::vector<Problem> suite(const std::string& name) {
  std::vector<Problem> all = registry();
  if (name == "all") return all;
  std::vector<Problem> out;
  for (auto& p : all) {
    const bool keep = (name == "unconstrained" && !p.bounds) || (name == "bound" && p.bounds) ||
                      (name == "convex" && p.convex) ||
                      (name == "small" && p.name != "rosenbrock_100" &&
                       p.name != "ext_rosenbrock_10" && p.name != "trigonometric_10" &&
                       p.name != "boxed_quadratic_1e4_10" && p.name != "quadratic_1e6_10");
    if (keep) out.push_back(std::move(p));
  }
  if (out.empty()) throw invalid_parameter("unknown suite: " + name);
  return out;
}

inline std::optional<Problem> find_problem(const std::string& name) {
  for (auto& p : registry())
    if (p.name == name) return std::move(p);
  return std::nullopt;
}

} // namespace bayesls::bench
