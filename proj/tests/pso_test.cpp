#include <cmath>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "mbq/pso.hpp"

namespace {

using mbq::PsoConfig;
using mbq::ThresholdSet;

const mbq::EffectiveSignal& default_signal() {
  static const auto z = mbq::effective_signal(mbq::SceneConfig{});
  return z;
}

const mbq::PsoResult& optimum(int q) {
  static const mbq::PsoResult r[] = {
      mbq::optimize_thresholds(1, default_signal(), 2.0, PsoConfig{}),
      mbq::optimize_thresholds(2, default_signal(), 2.0, PsoConfig{}),
      mbq::optimize_thresholds(3, default_signal(), 2.0, PsoConfig{}),
  };
  return r[q - 1];
}

// Optimal normalized thresholds found by direct Newton iteration on the
// stationarity conditions (independent of the swarm).
TEST(Pso, OneBitFindsZero) {
  const auto& r = optimum(1);
  EXPECT_NEAR(r.thresholds.interior()[0], 0.0, 1e-3);
  EXPECT_NEAR(r.objective / default_signal().energy(), 2.0 / std::numbers::pi, 1e-9);
}

TEST(Pso, TwoBitOptimum) {
  const auto& t = optimum(2).thresholds.interior();
  EXPECT_NEAR(t[0], -0.98160, 2e-3);
  EXPECT_NEAR(t[1], 0.0, 2e-3);
  EXPECT_NEAR(t[2], 0.98160, 2e-3);
  EXPECT_NEAR(optimum(2).objective / default_signal().energy(), 0.882518, 1e-5);
}

TEST(Pso, ThreeBitOptimum) {
  const double want[] = {-1.74793, -1.04996, -0.50055, 0.0, 0.50055, 1.04996, 1.74793};
  const auto& t = optimum(3).thresholds.interior();
  for (int k = 0; k < 7; ++k) EXPECT_NEAR(t[k], want[k], 1e-2) << k;
  EXPECT_NEAR(optimum(3).objective / default_signal().energy(), 0.965452, 1e-5);
}

TEST(Pso, OptimaAreSymmetric) {
  for (int q = 1; q <= 3; ++q) {
    const auto& t = optimum(q).thresholds.interior();
    for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(t[k], -t[t.size() - 1 - k], 1e-2);
  }
}

TEST(Pso, ObjectiveGrowsWithBitsAndStaysBelowUnquantized) {
  const double unquantized = default_signal().energy() / (2.0 / 2.0);  // sigma^2 / 2 = 1
  EXPECT_LT(optimum(1).objective, optimum(2).objective);
  EXPECT_LT(optimum(2).objective, optimum(3).objective);
  EXPECT_LT(optimum(3).objective, unquantized);
}

TEST(Pso, NotWorseThanCanonicalUniformGrid) {
  PsoConfig cfg;
  for (int q = 1; q <= 3; ++q) {
    const auto uniform = mbq::uniform_thresholds(q, cfg.radius_for(2.0));
    EXPECT_GE(optimum(q).objective, mbq::objective(uniform, default_signal(), 2.0));
  }
}

TEST(Pso, HistoryIsNondecreasingAndConverges) {
  for (int q = 1; q <= 3; ++q) {
    const auto& r = optimum(q);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(static_cast<int>(r.history.size()), r.iterations);
    for (std::size_t k = 1; k < r.history.size(); ++k) EXPECT_GE(r.history[k], r.history[k - 1]);
    EXPECT_EQ(r.history.back(), r.objective);
  }
}

TEST(Pso, SameSeedIsBitIdentical) {
  PsoConfig cfg;
  cfg.seed = 77;
  cfg.max_iters = 60;
  const auto a = mbq::optimize_thresholds(2, default_signal(), 2.0, cfg);
  const auto b = mbq::optimize_thresholds(2, default_signal(), 2.0, cfg);
  EXPECT_EQ(a.thresholds, b.thresholds);
  EXPECT_EQ(a.history, b.history);
}

TEST(Pso, IterationCapReportsNonConvergence) {
  PsoConfig cfg;
  cfg.max_iters = 5;
  const auto r = mbq::optimize_thresholds(3, default_signal(), 2.0, cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 5);
}

TEST(Pso, ScalesWithNoiseStandardDeviation) {
  const auto r = mbq::optimize_thresholds(2, default_signal(), 8.0, PsoConfig{});
  const auto& t = r.thresholds.interior();
  EXPECT_NEAR(t[2], 2.0 * 0.98160, 4e-3);
}

TEST(Pso, RejectsBadConfig) {
  PsoConfig cfg;
  cfg.swarm_size = 1;
  EXPECT_THROW(mbq::optimize_thresholds(1, default_signal(), 2.0, cfg), mbq::validation_error);
  cfg = {};
  cfg.search_radius = -1.0;
  EXPECT_THROW(mbq::optimize_thresholds(1, default_signal(), 2.0, cfg), mbq::validation_error);
  EXPECT_THROW(mbq::optimize_thresholds(0, default_signal(), 2.0, PsoConfig{}), mbq::validation_error);
}

TEST(RepairPosition, SortsClampsAndSeparates) {
  std::vector<double> x{3.0, -9.0, 0.5, 0.5, 7.0};
  mbq::repair_position(x, 2.0);
  EXPECT_EQ(x.front(), -2.0);
  for (std::size_t k = 1; k < x.size(); ++k) EXPECT_GT(x[k], x[k - 1]);
  EXPECT_NEAR(x.back(), 2.0, 1e-8);
}

TEST(Objective, DegenerateOrInvalidSetsScoreMinusInfinity) {
  const std::vector<double> bad{0.5, 0.1, 1.0};
  EXPECT_EQ(mbq::objective(bad, 2, default_signal(), 2.0), -INFINITY);
  EXPECT_EQ(mbq::objective(ThresholdSet(1, {45.0}), default_signal(), 2.0), -INFINITY);
}

TEST(ThresholdFile, RoundTrip) {
  const auto& r = optimum(2);
  const std::string path = ::testing::TempDir() + "mbq_q2.txt";
  {
    std::ofstream out(path);
    out << mbq::format_threshold_file(r.thresholds, {1, r.iterations, r.objective, r.converged, -14.0});
  }
  EXPECT_EQ(mbq::read_threshold_file(path), r.thresholds);
  EXPECT_THROW(mbq::read_threshold_file(path + ".missing"), mbq::validation_error);
}

}  // namespace
