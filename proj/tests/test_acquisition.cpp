#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bayesls/acquisition.hpp"
#include "support.hpp"

using namespace bayesls;
using testing_support::relative_error;

namespace {

GpPosterior random_posterior(std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 1 + static_cast<int>(u(rng) * 6);
  std::vector<PhiSample> obs;
  const double a = u(rng) * 4 - 2, b = 2 + 8 * u(rng);
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * u(rng);
    obs.push_back({x, a * std::cos(b * x) + x, -a * b * std::sin(b * x) + 1});
  }
  double mean = obs.front().phi;
  for (const auto& s : obs) mean = std::min(mean, s.phi);
  return GpPosterior::condition({Matern52Kernel(hi - lo), mean, 0.0, 0.0}, obs, hi - lo);
}

double grid_max(const GpPosterior& gp, double kappa, double lo, double hi, int n) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) best = std::max(best, lcb(gp, kappa, lo + (hi - lo) * i / (n - 1)).value);
  return best;
}

} // namespace

TEST(Lcb, Arithmetic) {
  // One observation puts mean and std at known values away from it.
  const auto prior = GpPrior{Matern52Kernel(1.0), 1.0, 0.0, 0.0};
  const auto gp = GpPosterior::condition(prior, std::vector<PhiSample>{});
  const AcquisitionValue v = lcb(gp, 2.0, 0.3);
  EXPECT_EQ(v.value, -1.0 + 2.0 * 1.0);
  const auto p = gp.predict(0.3);
  EXPECT_EQ(lcb(gp, 0.0, 0.3).value, -p.mean);
}

TEST(Lcb, DerivativeMatchesFiniteDifferences) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const auto gp = random_posterior(rng, 0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
      const double x = u(rng);
      const double h = 1e-6;
      const AcquisitionValue v = lcb(gp, 2.0, x);
      if (gp.predict(x).std < 1e-4) continue;
      const double fd = (lcb(gp, 2.0, x + h).value - lcb(gp, 2.0, x - h).value) / (2 * h);
      EXPECT_LT(relative_error(v.derivative, fd, 1e-4), 1e-5);
    }
  }
}

TEST(MaximizeAcquisition, ConstantPicksMidpoint) {
  const auto gp = GpPosterior::condition({Matern52Kernel(1.0), 0.0, 0.0, 0.0},
                                         std::vector<PhiSample>{});
  const auto r = maximize_acquisition(gp, 2.0, 0.0, 4.0);
  EXPECT_EQ(r.x, 2.0);
  EXPECT_LE(r.evaluations_used, AcquisitionOptions{}.budget + 3 * (1 + 20));
}

TEST(MaximizeAcquisition, ExploresAwayFromSingleObservation) {
  const std::vector<PhiSample> obs{{0.0, 0.0, 0.0}};
  const auto gp = GpPosterior::condition({Matern52Kernel(1.0), 0.0, 0.0, 0.0}, obs);
  const auto r = maximize_acquisition(gp, 2.0, 0.0, 1.0);
  // 1e4-point grid oracle.
  double gx = 0, gv = -1e300;
  for (int i = 0; i < 10000; ++i) {
    const double x = i / 9999.0;
    const double v = lcb(gp, 2.0, x).value;
    if (v > gv) gv = v, gx = x;
  }
  EXPECT_NEAR(gx, 1.0, 0.05);
  EXPECT_NEAR(r.x, 1.0, 0.05);
  EXPECT_GE(r.value, gv - 1e-9);
}

TEST(MaximizeAcquisition, SmoothStubTarget) {
  auto fn = [](double x) { return AcquisitionValue{-(x - 0.3) * (x - 0.3), -2 * (x - 0.3)}; };
  const auto r = maximize_on_interval(fn, 0.0, 1.0);
  EXPECT_NEAR(r.x, 0.3, 1e-4);
}

TEST(MaximizeAcquisition, BeatsEverySampleAndStaysInBounds) {
  std::mt19937 rng(23);
  for (int t = 0; t < 50; ++t) {
    const auto gp = random_posterior(rng, 0.0, 2.0);
    std::vector<double> seen;
    auto fn = [&](double x) {
      const AcquisitionValue v = lcb(gp, 2.0, x);
      seen.push_back(v.value);
      return v;
    };
    const auto r = maximize_on_interval(fn, 0.0, 2.0);
    EXPECT_GE(r.x, 0.0);
    EXPECT_LE(r.x, 2.0);
    EXPECT_EQ(static_cast<std::size_t>(r.evaluations_used), seen.size());
    for (double v : seen) EXPECT_GE(r.value, v);
    EXPECT_EQ(r.value, lcb(gp, 2.0, r.x).value);
  }
}

TEST(MaximizeAcquisition, GridStrengthAndDeterminism) {
  std::mt19937 rng(29);
  for (int t = 0; t < 100; ++t) {
    const auto gp = random_posterior(rng, 0.0, 1.0);
    const auto a = maximize_acquisition(gp, 2.0, 0.0, 1.0);
    const auto b = maximize_acquisition(gp, 2.0, 0.0, 1.0);
    EXPECT_EQ(a.x, b.x);
    EXPECT_GE(a.value, grid_max(gp, 2.0, 0.0, 1.0, 256) - 1e-9);
  }
}

TEST(MaximizeAcquisition, KappaZeroMinimizesMean) {
  const std::vector<PhiSample> obs{{0.0, 1.0, -2.0}, {1.0, 0.0, 0.0}, {2.0, 1.0, 2.0}};
  const auto gp = GpPosterior::condition({Matern52Kernel(2.0), 0.0, 0.0, 0.0}, obs);
  const auto r = maximize_acquisition(gp, 0.0, 0.0, 2.0);
  EXPECT_NEAR(r.x, 1.0, 1e-6);
}

TEST(MaximizeAcquisition, RejectsBadInterval) {
  auto fn = [](double) { return AcquisitionValue{0.0, 0.0}; };
  EXPECT_THROW(maximize_on_interval(fn, 1.0, 1.0), invalid_parameter);
  EXPECT_THROW(maximize_on_interval(fn, 0.0, std::numeric_limits<double>::infinity()),
               invalid_parameter);
}
