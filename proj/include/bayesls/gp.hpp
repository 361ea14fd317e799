#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "errors.hpp"
#include "wolfe.hpp"

namespace bayesls {

/// Matern kernel with smoothness 5/2 on the real line.
class Matern52Kernel {
public:
  struct Partials {
    double dp = 0.0;   // d/dp k(p, q)
    double dq = 0.0;   // d/dq k(p, q)
    double dpdq = 0.0; // d^2/(dp dq) k(p, q)
  };

  explicit Matern52Kernel(double length_scale) : l_(length_scale) {
    if (!(l_ > 0.0) || !std::isfinite(l_))
      throw invalid_parameter("length scale must be positive and finite");
  }

  double length_scale() const noexcept { return l_; }

  double operator()(double p, double q) const noexcept {
    const double s = kSqrt5 * std::abs(p - q) / l_;
    return (1.0 + s + s * s / 3.0) * std::exp(-s);
  }

  Partials partials(double p, double q) const noexcept {
    const double d = p - q;
    const double s = kSqrt5 * std::abs(d) / l_;
    const double e = std::exp(-s);
    const double c = 5.0 / (3.0 * l_ * l_);
    const double dp = -c * d * (1.0 + s) * e;
    return {dp, -dp, c * (1.0 + s - s * s) * e};
  }

private:
  static constexpr double kSqrt5 = 2.23606797749978969640917366873127623544;
  double l_;
};

struct GpPrior {
  Matern52Kernel kernel{1.0};
  double mean = 0.0;
  double value_noise = 0.0;
  double gradient_noise = 0.0;
};

/// Posterior mean and standard deviation at a point, with x-derivatives.
struct GpPrediction {
  double mean = 0.0;
  double std = 0.0;
  double dmean = 0.0;
  double dstd = 0.0;
  double variance = 0.0;  // clamped at zero
  double dvariance = 0.0;
};

/// Gaussian process conditioned on values and slopes at distinct steps.
///
/// The joint Gram matrix is ordered [values; slopes]:
///   [ k(Xi,Xj)       dk/dq(Xi,Xj)      ]
///   [ dk/dp(Xi,Xj)   d2k/dpdq(Xi,Xj)   ]
/// Immutable after construction.
class GpPosterior {
public:
  /// Conditions `prior` on `samples`. Samples closer than
  /// 1e-12 * dedup_scale to an earlier sample are dropped; a non-positive
  /// dedup_scale uses the spread of the samples.
  static GpPosterior condition(const GpPrior& prior,
                               std::span<const PhiSample> samples,
                               double dedup_scale = 0.0) {
    GpPosterior gp(prior);
    gp.obs_ = deduplicate(samples, dedup_scale);
    gp.factorize();
    return gp;
  }

  GpPrediction predict(double x) const {
    GpPrediction out;
    const auto n = static_cast<Eigen::Index>(obs_.size());
    if (n == 0) {
      out.mean = prior_.mean;
      out.variance = 1.0;
      out.std = 1.0;
      return out;
    }
    Eigen::VectorXd kx(2 * n), dkx(2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double xj = obs_[static_cast<std::size_t>(j)].alpha;
      const auto part = prior_.kernel.partials(x, xj);
      kx(j) = prior_.kernel(x, xj);
      kx(n + j) = part.dq;
      dkx(j) = part.dp;
      dkx(n + j) = part.dpdq;
    }
    out.mean = prior_.mean + kx.dot(weights_);
    out.dmean = dkx.dot(weights_);

    const auto lower = chol_.matrixL();
    const Eigen::VectorXd v = lower.solve(kx);
    const Eigen::VectorXd w = lower.solve(dkx);
    // k(x,x) = 1 and its derivative vanishes for a stationary kernel.
    const double var = 1.0 - v.squaredNorm();
    const double dvar = -2.0 * w.dot(v);
    out.variance = std::max(var, 0.0);
    out.std = std::sqrt(out.variance);
    out.dvariance = dvar;
    out.dstd = out.std > 0.0 ? dvar / (2.0 * out.std) : 0.0;
    return out;
  }

  const GpPrior& prior() const noexcept { return prior_; }
  const std::vector<PhiSample>& observations() const noexcept { return obs_; }
  std::size_t size() const noexcept { return obs_.size(); }
  /// Relative diagonal jitter that made the factorization succeed.
  double jitter() const noexcept { return jitter_; }

  /// Joint Gram matrix K(X,X) + noise + jitter, as factorized.
  Eigen::MatrixXd regularized_gram() const {
    Eigen::MatrixXd k = gram(prior_.kernel, obs_);
    add_diagonal(k, jitter_);
    return k;
  }

  Eigen::MatrixXd cholesky_factor() const {
    return chol_.matrixL().toDenseMatrix();
  }

  /// Noise-free joint Gram matrix for the given steps.
  static Eigen::MatrixXd gram(const Matern52Kernel& kernel,
                              std::span<const PhiSample> obs) {
    const auto n = static_cast<Eigen::Index>(obs.size());
    Eigen::MatrixXd k(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double xi = obs[static_cast<std::size_t>(i)].alpha;
        const double xj = obs[static_cast<std::size_t>(j)].alpha;
        const auto part = kernel.partials(xi, xj);
        k(i, j) = kernel(xi, xj);
        k(i, n + j) = part.dq;
        k(n + i, j) = part.dp;
        k(n + i, n + j) = part.dpdq;
      }
    }
    return k;
  }

private:
  explicit GpPosterior(const GpPrior& prior) : prior_(prior) {}

  static std::vector<PhiSample> deduplicate(std::span<const PhiSample> samples,
                                            double scale) {
    if (!(scale > 0.0) && !samples.empty()) {
      auto [lo, hi] = std::minmax_element(
          samples.begin(), samples.end(),
          [](const PhiSample& a, const PhiSample& b) { return a.alpha < b.alpha; });
      scale = hi->alpha - lo->alpha;
    }
    const double tol = 1e-12 * scale;
    std::vector<PhiSample> kept;
    kept.reserve(samples.size());
    for (const auto& s : samples) {
      const bool close = std::any_of(kept.begin(), kept.end(), [&](const PhiSample& k) {
        return std::abs(k.alpha - s.alpha) <= tol;
      });
      if (!close) kept.push_back(s);
    }
    return kept;
  }

  // Adds noise to the diagonal plus a relative jitter eps * K_ii.
  void add_diagonal(Eigen::MatrixXd& k, double eps) const {
    const Eigen::Index n = k.rows() / 2;
    for (Eigen::Index i = 0; i < n; ++i) {
      k(i, i) += prior_.value_noise;
      k(n + i, n + i) += prior_.gradient_noise;
    }
    if (eps > 0.0) k.diagonal() *= (1.0 + eps);
  }

  void factorize() {
    const auto n = static_cast<Eigen::Index>(obs_.size());
    if (n == 0) return;
    const Eigen::MatrixXd base = gram(prior_.kernel, obs_);
    Eigen::VectorXd y(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      y(i) = obs_[static_cast<std::size_t>(i)].phi - prior_.mean;
      y(n + i) = obs_[static_cast<std::size_t>(i)].dphi;
    }
    for (double eps = 0.0; eps <= 1e-4 * 1.0000001;
         eps = (eps == 0.0 ? 1e-10 : eps * 10.0)) {
      Eigen::MatrixXd k = base;
      add_diagonal(k, eps);
      chol_.compute(k);
      if (chol_.info() == Eigen::Success && chol_.matrixLLT().diagonal().minCoeff() > 0.0) {
        jitter_ = eps;
        weights_ = chol_.solve(y);
        if (weights_.allFinite()) return;
      }
    }
    throw singular_kernel_matrix("kernel matrix is not positive definite after jitter");
  }

  GpPrior prior_;
  std::vector<PhiSample> obs_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd weights_;
  double jitter_ = 0.0;
};

} // namespace bayesls
