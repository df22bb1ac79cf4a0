#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <cmath>
#include <vector>

#include "robloc/model.hpp"

namespace robloc {
namespace {

Scenario Make2d(double sx, double sy, std::vector<std::pair<double, double>> pts) {
  Eigen::VectorXd src(2);
  src << sx, sy;
  Eigen::MatrixXd sensors(2, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) sensors.col(static_cast<Eigen::Index>(i)) << pts[i].first, pts[i].second;
  return Scenario(src, sensors);
}

double Median(Eigen::VectorXd v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::nth_element(s.begin(), s.begin() + s.size() / 2, s.end());
  return s[s.size() / 2];
}

TEST(TrueRanges, ThreeFourFive) {
  const Scenario sc = Make2d(0, 0, {{3, 4}});
  EXPECT_DOUBLE_EQ(TrueRanges(sc)(0), 5.0);
}

TEST(TrueRanges, CoincidentSourceIsZeroAndWarns) {
  const Scenario sc = Make2d(2, 3, {{2, 3}});
  EXPECT_EQ(TrueRanges(sc)(0), 0.0);
  EXPECT_FALSE(sc.Warnings().empty());
}

TEST(TrueRanges, FixedPerimeterScenario) {
  // Sensors walk the 20 m square from the lower-left corner; distances by hand.
  const Scenario sc = FixedPerimeterScenario();
  const std::vector<double> expected = {std::sqrt(313.0), std::sqrt(173.0), std::sqrt(233.0), std::sqrt(73.0),
                                        std::sqrt(113.0), std::sqrt(53.0),  std::sqrt(193.0), std::sqrt(153.0)};
  const Eigen::VectorXd r = TrueRanges(sc);
  ASSERT_EQ(r.size(), 8);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(r(i), expected[static_cast<std::size_t>(i)], 1e-12) << i;
}

TEST(TrueRanges, NonnegativeAndRelabelingSymmetric) {
  Rng rng(RngSeed{11});
  for (int trial = 0; trial < 50; ++trial) {
    const Scenario sc = RandomSquareScenario(6, 20.0, rng);
    const Eigen::VectorXd r = TrueRanges(sc);
    EXPECT_TRUE((r.array() >= 0.0).all());
    Eigen::MatrixXd perm = sc.sensors.rowwise().reverse();
    const Eigen::VectorXd rp = TrueRanges(Scenario(sc.source, perm));
    for (int i = 0; i < 6; ++i) EXPECT_EQ(rp(i), r(5 - i));
  }
}

TEST(Scenario, RejectsCoincidentSensors) {
  EXPECT_THROW(Make2d(0, 0, {{1, 1}, {1, 1}}), ModelError);
}

TEST(Scenario, WarnsWhenUnderdetermined) {
  const Scenario sc = Make2d(0, 0, {{1, 1}, {2, 1}});
  EXPECT_FALSE(sc.Warnings().empty());
  EXPECT_TRUE(FixedPerimeterScenario().Warnings().empty());
}

TEST(SampleStable, RejectsInvalidParameters) {
  EXPECT_THROW(SampleStable({0.0, 0.0, 1.0, 0.0}, 10, RngSeed{1}), ModelError);
  EXPECT_THROW(SampleStable({2.1, 0.0, 1.0, 0.0}, 10, RngSeed{1}), ModelError);
  EXPECT_THROW(SampleStable({1.5, 0.0, 0.0, 0.0}, 10, RngSeed{1}), ModelError);
  EXPECT_THROW(SampleStable({1.5, 0.0, -1.0, 0.0}, 10, RngSeed{1}), ModelError);
  EXPECT_THROW(SampleStable({1.5, 1.5, 1.0, 0.0}, 10, RngSeed{1}), ModelError);
}

TEST(SampleStable, AlphaTwoIsGaussianWithVarianceTwoGammaSquared) {
  for (double gamma : {1.0, 0.3}) {
    const Eigen::VectorXd x = SampleStable({2.0, 0.0, gamma, 0.0}, 100000, RngSeed{2024});
    const double mean = x.mean();
    const double var = (x.array() - mean).square().sum() / (x.size() - 1);
    EXPECT_NEAR(var, 2.0 * gamma * gamma, 0.05 * 2.0 * gamma * gamma);
    EXPECT_NEAR(mean, 0.0, 0.02);
  }
}

TEST(SampleStable, CauchyMedianIsZero) {
  const Eigen::VectorXd x = SampleStable({1.0, 0.0, 1.0, 0.0}, 100000, RngSeed{77});
  EXPECT_NEAR(Median(x), 0.0, 0.05);
}

TEST(SampleStable, SymmetricAboutLocation) {
  const Eigen::VectorXd x = SampleStable({1.5, 0.0, 1.0, 5.0}, 100000, RngSeed{78});
  EXPECT_NEAR(Median(x), 5.0, 0.1);
}

TEST(SampleStable, ZeroSkewMedianWithinSymmetryBound) {
  const int n = 100000;
  for (double alpha : {0.8, 1.2, 1.5, 1.9}) {
    const double gamma = 2.0;
    const Eigen::VectorXd x = SampleStable({alpha, 0.0, gamma, 0.0}, n, RngSeed{static_cast<std::uint64_t>(alpha * 100)});
    EXPECT_LT(std::abs(Median(x)), 5.0 * gamma / std::sqrt(double(n)) * 3.0) << alpha;
  }
}

TEST(SampleStable, SkewedPositiveMassMatchesClosedForm) {
  // For alpha != 1 and mu = 0: P(X > 0) = 1/2 + atan(zeta tan(pi alpha / 2)) / (pi alpha).
  const int n = 50000;
  for (auto [alpha, zeta] : {std::pair{1.5, 1.0}, std::pair{1.5, -0.5}, std::pair{0.7, 0.8}}) {
    const Eigen::VectorXd x = SampleStable({alpha, zeta, 1.0, 0.0}, n, RngSeed{9});
    ASSERT_TRUE(x.allFinite());
    const double expected = 0.5 + std::atan(zeta * std::tan(M_PI * alpha / 2.0)) / (M_PI * alpha);
    EXPECT_NEAR(static_cast<double>((x.array() > 0.0).count()) / n, expected, 0.01) << alpha << " " << zeta;
  }
  const Eigen::VectorXd y = SampleStable({1.0, 0.5, 2.0, 0.0}, 1000, RngSeed{9});
  EXPECT_TRUE(y.allFinite());
}

TEST(SampleStable, DeterministicForSeed) {
  const Eigen::VectorXd a = SampleStable({1.3, 0.0, 1.0, 0.0}, 1000, RngSeed{5});
  const Eigen::VectorXd b = SampleStable({1.3, 0.0, 1.0, 0.0}, 1000, RngSeed{5});
  EXPECT_EQ(0, std::memcmp(a.data(), b.data(), sizeof(double) * 1000));
}

TEST(Measure, VanishingNoiseGivesTrueRanges) {
  const Scenario sc = FixedPerimeterScenario();
  const Measurements m = Measure(sc, {1.5, 0.0, 1e-12, 0.0}, RngSeed{1});
  EXPECT_LE((m.ranges - TrueRanges(sc)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(m.noise.size(), 8);
  EXPECT_TRUE((m.sigma.array() == 1.0).all());
}

TEST(Measure, PureFunctionOfInputs) {
  const Scenario sc = FixedPerimeterScenario();
  const StableParams p{1.5, 0.0, 0.7, 0.0};
  const Measurements a = Measure(sc, p, RngSeed{99});
  const Measurements b = Measure(sc, p, RngSeed{99});
  EXPECT_EQ(a.ranges, b.ranges);
  EXPECT_EQ(a.noise, b.noise);
  EXPECT_NE(a.ranges, Measure(sc, p, RngSeed{100}).ranges);
}

TEST(Measure, HeavyTailsProduceLargeResiduals) {
  const Scenario sc = FixedPerimeterScenario();
  StableParams p{1.5, 0.0, GammaForGsnr(sc, 1.5, 20.0), 0.0};
  int runs_with_outlier = 0;
  int runs_with_negative = 0;
  for (int run = 0; run < 3000; ++run) {
    Rng rng = Rng::Stream(RngSeed{1}, 0, static_cast<std::uint64_t>(run));
    const Measurements m = Measure(sc, p, rng);
    runs_with_outlier += m.noise.cwiseAbs().maxCoeff() > 10.0 ? 1 : 0;
    runs_with_negative += m.HasNegativeRanges() ? 1 : 0;
  }
  EXPECT_GE(runs_with_outlier, 1);
  // Negative ranges are kept, not clipped.
  EXPECT_GE(runs_with_negative, 0);
}

TEST(Gsnr, WorkedExamples) {
  EXPECT_NEAR(Gsnr(Make2d(0, 0, {{10, 0}}), {2.0, 0.0, 1.0, 0.0}), 20.0, 1e-12);
  EXPECT_NEAR(Gsnr(Make2d(0, 0, {{3, 0}, {0, 4}}), {1.5, 0.0, 1.0, 0.0}), 10.969100130080564, 1e-12);
  // sum d^2 = L gamma^alpha -> 0 dB.
  EXPECT_NEAR(Gsnr(Make2d(0, 0, {{2, 0}, {0, 2}}), {2.0, 0.0, 2.0, 0.0}), 0.0, 1e-12);
  EXPECT_THROW(Gsnr(Make2d(0, 0, {{1, 0}}), {2.0, 0.0, 0.0, 0.0}), ModelError);
}

TEST(GammaForGsnr, InvertsWorkedExample) {
  EXPECT_NEAR(GammaForGsnr(Make2d(0, 0, {{10, 0}}), 2.0, 20.0), 1.0, 1e-12);
}

TEST(GammaForGsnr, RoundTripProperty) {
  Rng rng(RngSeed{31});
  for (int trial = 0; trial < 200; ++trial) {
    const Scenario sc = RandomSquareScenario(3 + trial % 7, 20.0, rng);
    const double alpha = rng.Uniform(0.5, 2.0);
    const double target = rng.Uniform(-10.0, 40.0);
    const double gamma = GammaForGsnr(sc, alpha, target);
    EXPECT_NEAR(Gsnr(sc, {alpha, 0.0, gamma, 0.0}), target, 1e-10);
  }
}

TEST(GammaForGsnr, MonotoneAndRejectsInfinity) {
  const Scenario sc = FixedPerimeterScenario();
  double prev = GammaForGsnr(sc, 1.5, 0.0);
  for (double t = 10.0; t <= 200.0; t += 10.0) {
    const double g = GammaForGsnr(sc, 1.5, t);
    EXPECT_LT(g, prev);
    prev = g;
  }
  EXPECT_LT(prev, 1e-10);
  EXPECT_THROW(GammaForGsnr(sc, 1.5, -INFINITY), ModelError);
  EXPECT_THROW(GammaForGsnr(sc, 1.5, NAN), ModelError);
}

TEST(Geometry, PerimeterSensorsAreEvenlySpaced) {
  const Eigen::MatrixXd s = PerimeterSensors(8, 20.0);
  Eigen::MatrixXd expected(2, 8);
  expected << -10, 0, 10, 10, 10, 0, -10, -10,
              -10, -10, -10, 0, 10, 10, 10, 0;
  EXPECT_TRUE(s.isApprox(expected, 1e-15));
  const Eigen::MatrixXd big = PerimeterSensors(64, 20.0);
  for (int i = 0; i < 64; ++i) {
    EXPECT_NEAR(big.col(i).cwiseAbs().maxCoeff(), 10.0, 1e-12);
  }
}

TEST(Geometry, RandomSquareStaysInside) {
  Rng rng(RngSeed{8});
  for (int i = 0; i < 100; ++i) {
    const Scenario sc = RandomSquareScenario(8, 20.0, rng);
    EXPECT_LE(sc.sensors.cwiseAbs().maxCoeff(), 10.0);
    EXPECT_LE(sc.source.cwiseAbs().maxCoeff(), 10.0);
  }
}

}  // namespace
}  // namespace robloc
