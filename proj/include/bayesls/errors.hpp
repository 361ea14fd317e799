#pragma once

#include <stdexcept>
#include <string>

namespace bayesls {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class not_descent_direction : public error {
public:
  explicit not_descent_direction(double slope)
      : error("direction is not a descent direction (slope " +
              std::to_string(slope) + ")"),
        slope_(slope) {}
  double slope() const noexcept { return slope_; }

private:
  double slope_;
};

class dimension_mismatch : public error {
public:
  using error::error;
};

/// The objective returned NaN or infinity. Line searches treat this as
/// "step too far" and shrink toward the lower end.
class non_finite_value : public error {
public:
  explicit non_finite_value(double step)
      : error("objective is not finite at step " + std::to_string(step)),
        step_(step) {}
  double step() const noexcept { return step_; }

private:
  double step_;
};

class singular_kernel_matrix : public error {
public:
  using error::error;
};

class no_interior_point : public error {
public:
  using error::error;
};

class invalid_parameter : public error {
public:
  using error::error;
};

} // namespace bayesls
