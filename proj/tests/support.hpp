#pragma once

#include <functional>
#include <memory>

#include "bayesls/objective.hpp"

namespace testing_support {

using bayesls::Evaluation;
using bayesls::MultivariateObjective;
using bayesls::Vector;

/// f(z) = phi(z) in one dimension, so the ray from 0 along +1 is phi itself.
inline MultivariateObjective one_dimensional(std::function<double(double)> phi,
                                             std::function<double(double)> dphi) {
  return MultivariateObjective(1, [phi, dphi](const Vector& z) {
    return Evaluation{phi(z(0)), Vector::Constant(1, dphi(z(0)))};
  });
}

/// Line objective along +1 from the origin of a one-dimensional function.
/// The MultivariateObjective is kept alive alongside.
struct Ray {
  std::shared_ptr<MultivariateObjective> f;
  bayesls::LineObjective line;

  Ray(std::function<double(double)> phi, std::function<double(double)> dphi)
      : f(std::make_shared<MultivariateObjective>(one_dimensional(phi, dphi))),
        line(*f, Vector::Zero(1), Vector::Ones(1)) {}
};

inline MultivariateObjective half_squared_norm(Eigen::Index n) {
  return MultivariateObjective(n, [](const Vector& z) {
    return Evaluation{0.5 * z.squaredNorm(), z};
  });
}

inline double central_difference(const std::function<double(double)>& g, double x, double h) {
  return (g(x + h) - g(x - h)) / (2.0 * h);
}

// Fourth-order five-point stencil.
inline double five_point(const std::function<double(double)>& g, double x, double h) {
  return (-g(x + 2 * h) + 8 * g(x + h) - 8 * g(x - h) + g(x - 2 * h)) / (12.0 * h);
}

inline double relative_error(double a, double b, double floor = 1e-12) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

} // namespace testing_support
