#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <utility>

#include <Eigen/Core>

#include "errors.hpp"
#include "wolfe.hpp"

namespace bayesls {

using Vector = Eigen::VectorXd;

struct Evaluation {
  double value = 0.0;
  Vector gradient;
};

/// Type-erased f: R^n -> R together with its gradient.
class MultivariateObjective {
public:
  using Function = std::function<Evaluation(const Vector&)>;

  MultivariateObjective(Eigen::Index dimension, Function fn)
      : dimension_(dimension), fn_(std::move(fn)) {
    if (dimension_ <= 0)
      throw invalid_parameter("objective dimension must be positive");
  }

  Eigen::Index dimension() const noexcept { return dimension_; }

  Evaluation operator()(const Vector& x) const {
    if (x.size() != dimension_)
      throw dimension_mismatch("point has wrong dimension");
    Evaluation e = fn_(x);
    if (e.gradient.size() != dimension_)
      throw dimension_mismatch("objective returned gradient of wrong dimension");
    return e;
  }

private:
  Eigen::Index dimension_;
  Function fn_;
};

/// phi(a) = f(x + a p) with an exact-key evaluation cache.
///
/// The referenced objective must outlive this object. Not thread-safe; one
/// line search uses one instance at a time.
class LineObjective {
public:
  /// Evaluates f at the origin (one counted evaluation).
  LineObjective(const MultivariateObjective& f, Vector x, Vector p)
      : f_(&f), x_(std::move(x)), p_(std::move(p)) {
    check_dimensions();
    Evaluation e = (*f_)(x_);
    ++eval_count_;
    seed(std::move(e));
  }

  /// Reuses a known evaluation at the origin; no evaluation is counted.
  LineObjective(const MultivariateObjective& f, Vector x, Vector p,
                Evaluation at_origin)
      : f_(&f), x_(std::move(x)), p_(std::move(p)) {
    check_dimensions();
    if (at_origin.gradient.size() != x_.size())
      throw dimension_mismatch("origin gradient has wrong dimension");
    seed(std::move(at_origin));
  }

  const PhiSample& at_zero() const noexcept { return zero_; }

  /// phi and phi' at step alpha. Cached re-queries are free.
  PhiSample eval(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
      throw invalid_parameter("step must be finite and non-negative");
    if (auto it = cache_.find(alpha); it != cache_.end())
      return it->second.sample;
    Evaluation e = (*f_)(point(alpha));
    ++eval_count_;
    PhiSample s{alpha, e.value, p_.dot(e.gradient)};
    if (!std::isfinite(s.phi) || !std::isfinite(s.dphi))
      throw non_finite_value(alpha);
    cache_.emplace(alpha, Entry{s, std::move(e.gradient)});
    return s;
  }

  /// Fresh evaluation that bypasses the cache and the counter.
  PhiSample reevaluate(double alpha) const {
    Evaluation e = (*f_)(point(alpha));
    return {alpha, e.value, p_.dot(e.gradient)};
  }

  bool is_cached(double alpha) const { return cache_.count(alpha) != 0; }

  /// Full gradient at a cached step.
  const Vector& gradient(double alpha) const {
    auto it = cache_.find(alpha);
    if (it == cache_.end())
      throw invalid_parameter("gradient requested at an unevaluated step");
    return it->second.gradient;
  }

  Vector point(double alpha) const { return x_ + alpha * p_; }

  int eval_count() const noexcept { return eval_count_; }
  const Vector& origin() const noexcept { return x_; }
  const Vector& direction() const noexcept { return p_; }
  const MultivariateObjective& objective() const noexcept { return *f_; }

private:
  struct Entry {
    PhiSample sample;
    Vector gradient;
  };

  void check_dimensions() const {
    if (x_.size() != f_->dimension() || p_.size() != f_->dimension())
      throw dimension_mismatch("origin and direction must match the objective");
  }

  void seed(Evaluation e) {
    zero_ = PhiSample{0.0, e.value, p_.dot(e.gradient)};
    if (!std::isfinite(zero_.phi) || !std::isfinite(zero_.dphi))
      throw non_finite_value(0.0);
    if (!(zero_.dphi < 0.0)) throw not_descent_direction(zero_.dphi);
    cache_.emplace(0.0, Entry{zero_, std::move(e.gradient)});
  }

  const MultivariateObjective* f_;
  Vector x_;
  Vector p_;
  PhiSample zero_;
  std::map<double, Entry> cache_;
  int eval_count_ = 0;
};

inline LineObjective make_line_objective(const MultivariateObjective& f,
                                         Vector x, Vector p) {
  return LineObjective(f, std::move(x), std::move(p));
}

} // namespace bayesls
