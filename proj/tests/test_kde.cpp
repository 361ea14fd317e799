#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "bayesls/kde.hpp"

using namespace bayesls;

TEST(Silverman, MatchesRuleOfThumb) {
  const std::vector<double> pts{0.1, 0.2, 0.4, 0.8};
  const double mean = (0.1 + 0.2 + 0.4 + 0.8) / 4;
  double ss = 0;
  for (double p : pts) ss += (p - mean) * (p - mean);
  const double expected = 1.06 * std::sqrt(ss / 3) * std::pow(4.0, -0.2);
  EXPECT_DOUBLE_EQ(silverman_bandwidth(pts, 0.0), expected);
}

TEST(Silverman, FloorAppliesToClusters) {
  const std::vector<double> pts{0.5, 0.5, 0.5};
  EXPECT_EQ(silverman_bandwidth(pts, 1e-3), 1e-3);
  const std::vector<double> one{0.5};
  EXPECT_EQ(silverman_bandwidth(one, 2e-3), 2e-3);
}

TEST(Kde, DensityIsNormalizedGaussianMixture) {
  const KdeEstimate est({0.0}, 0.5);
  EXPECT_NEAR(kde_density(est, 0.0), 1.0 / (0.5 * std::sqrt(2 * std::numbers::pi)), 1e-15);
  // 1e5-point trapezoid over +-10 bandwidths.
  const int n = 100000;
  const double a = -5.0, b = 5.0, h = (b - a) / (n - 1);
  double sum = 0.5 * (est.density(a) + est.density(b));
  for (int i = 1; i < n - 1; ++i) sum += est.density(a + i * h);
  EXPECT_NEAR(sum * h, 1.0, 1e-3);
  EXPECT_THROW(KdeEstimate({}, 1.0), invalid_parameter);
  EXPECT_THROW(KdeEstimate({1.0}, 0.0), invalid_parameter);
}

TEST(Kde, SymmetricPairPeaksBetween) {
  const double a = 0.3;
  const KdeEstimate est({-a, a}, a);
  EXPECT_GT(est.density(0.0), est.density(2 * a));
}

TEST(DensestPoint, PicksTheCluster) {
  const std::vector<double> pts{0.2, 0.21, 0.8};
  const double x = densest_point(pts, 0.0, 1.0);
  // Brute force over the candidates with the same estimate.
  const KdeEstimate est(pts, silverman_bandwidth(pts, 1e-3));
  double best = pts[0];
  for (double p : pts)
    if (est.density(p) > est.density(best)) best = p;
  EXPECT_EQ(x, best);
  EXPECT_TRUE(x == 0.2 || x == 0.21);
}

TEST(DensestPoint, SingleInteriorPoint) {
  const std::vector<double> pts{0.0, 0.4, 1.0};
  EXPECT_EQ(densest_point(pts, 0.0, 1.0), 0.4);
}

TEST(DensestPoint, OnlyInteriorCandidates) {
  // Endpoints are dense but excluded; one interior point remains.
  const std::vector<double> pts{0.0, 0.0001, 1.0, 0.5};
  const double x = densest_point(pts, 0.0001, 1.0);
  EXPECT_EQ(x, 0.5);
  const std::vector<double> ends{0.0, 1.0};
  EXPECT_THROW(densest_point(ends, 0.0, 1.0), no_interior_point);
}

TEST(DensestPoint, BoundsInEitherOrderAndTiesToSmaller) {
  const std::vector<double> pts{0.3, 0.7};
  EXPECT_EQ(densest_point(pts, 0.0, 1.0), 0.3);
  EXPECT_EQ(densest_point(pts, 1.0, 0.0), 0.3);
}

TEST(DensestPoint, IgnoresPointsOutsideWindow) {
  const std::vector<double> pts{2.0, 2.01, 2.02, 0.3, 0.31, 0.7};
  const double x = densest_point(pts, 0.0, 1.0);
  EXPECT_TRUE(x == 0.3 || x == 0.31);
}
