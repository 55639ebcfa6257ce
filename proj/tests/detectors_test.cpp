#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "mbq/detectors.hpp"
#include "mbq/oracle.hpp"
#include "mbq/selftest.hpp"

namespace {

using mbq::cplx;
using mbq::EffectiveSignal;
using mbq::ThresholdSet;

const ThresholdSet kSign(1, {0.0});
const ThresholdSet kTwoBit(2, {-0.978, -0.008, 0.967});

TEST(RaoStatistic, SingleElementSignQuantizer) {
  // Numerator 2 (2 phi(0))^2 over denominator 4 phi(0)^2.
  const EffectiveSignal z{{1.0}, {0.0}};
  mbq::QuantizedObservation y{1, {2}, {2}};
  EXPECT_NEAR(mbq::rao_statistic(y, z, kSign, 2.0), 2.0, 1e-15);
}

TEST(RaoStatistic, ZeroSignalRejected) {
  const EffectiveSignal z{{0.0, 0.0}, {0.0, 0.0}};
  mbq::QuantizedObservation y{1, {1, 2}, {2, 1}};
  EXPECT_THROW(mbq::rao_statistic(y, z, kSign, 2.0), mbq::numerical_error);
}

TEST(RaoStatistic, LengthMismatchRejected) {
  const EffectiveSignal z{{1.0, 1.0}, {0.0, 0.0}};
  mbq::QuantizedObservation y{1, {1}, {2}};
  EXPECT_THROW(mbq::rao_statistic(y, z, kSign, 2.0), mbq::validation_error);
}

TEST(RaoStatistic, MatchesScoreOracleOnSmallTwoBitInstance) {
  const EffectiveSignal z{{0.8, -0.2, 1.1, 0.3}, {0.1, 0.9, -0.4, -1.2}};
  mbq::QuantizedObservation y{2, {3, 1, 4, 2}, {2, 4, 1, 3}};
  const double closed = mbq::rao_statistic(y, z, kTwoBit, 2.0);
  const double ref = mbq::oracle::rao_statistic(y, z, kTwoBit, 2.0);
  EXPECT_NEAR(closed, ref, 1e-6 * ref);
}

TEST(RaoStatistic, MatchesOracleOnRandomInstances) {
  const auto cmp = mbq::compare_with_oracle(60, 42);
  EXPECT_EQ(cmp.instances, 60);
  EXPECT_LE(cmp.max_relative_error, 1e-6);
}

TEST(RaoStatistic, OracleCatchesPerturbedDerivative) {
  const auto cmp = mbq::compare_with_oracle(20, 42, [](const ThresholdSet& t, double np) {
    auto bins = mbq::BinStatsTable(t, np).bins();
    bins.front().f1 *= 1.01;
    return mbq::BinStatsTable(std::move(bins));
  });
  EXPECT_GT(cmp.max_relative_error, 1e-3);
}

// Sign-quantizer special case coded directly:
//   score_R = sqrt(2/pi)/sigma_w-scaled sum of g sgn(Re y) + h sgn(Im y), etc.
TEST(RaoStatistic, OneBitSpecialCase) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 12;
    EffectiveSignal z;
    std::vector<cplx> x(n);
    for (int k = 0; k < n; ++k) {
      z.g.push_back(g(rng));
      z.h.push_back(g(rng));
      x[k] = {g(rng), g(rng)};
    }
    const double np = 0.5 + trial * 0.1;
    const auto y = mbq::quantize(x, kSign);
    // F = 1/2, F' = -+phi(0)/s: ratio r = +-2 phi(0) / s with s = sqrt(np/2).
    const double s = std::sqrt(np / 2.0);
    const double r = 2.0 / std::sqrt(2.0 * std::numbers::pi) / s;
    double sr = 0, si = 0, e = 0;
    for (int k = 0; k < n; ++k) {
      const double a = x[k].real() > 0 ? r : -r;
      const double b = x[k].imag() > 0 ? r : -r;
      sr += z.g[k] * a + z.h[k] * b;
      si += z.g[k] * b - z.h[k] * a;
      e += z.g[k] * z.g[k] + z.h[k] * z.h[k];
    }
    const double fi = e * 4.0 / (2.0 * std::numbers::pi) / (s * s);
    const double want = (sr * sr + si * si) / fi;
    EXPECT_NEAR(mbq::rao_statistic(y, z, kSign, np), want, 1e-12 * want);
  }
}

TEST(RaoStatistic, NonNegativeAndPhaseInvariantOnNoiseFreeData) {
  mbq::SceneConfig cfg;
  cfg.n_rx = 4;
  cfg.snapshots = 4;
  cfg.angle = 0.3;
  cfg.beta_r = 0.6;
  cfg.beta_i = 0.2;
  const auto z = mbq::effective_signal(cfg);
  const auto x = mbq::synthesize_observation(cfg, z, mbq::Hypothesis::H1, 1, mbq::NoiseMode::noise_free);
  const double base = mbq::rao_statistic(mbq::quantize(x, kTwoBit), z, kTwoBit, 2.0);
  EXPECT_GE(base, 0.0);
  // Rotating z by theta and beta by -theta leaves beta z (and so Y) unchanged.
  for (double theta : {0.4, 1.3, -2.2}) {
    const cplx rot = std::polar(1.0, theta);
    EffectiveSignal zr;
    for (std::size_t n = 0; n < z.size(); ++n) {
      const cplx v = rot * z.z(n);
      zr.g.push_back(v.real());
      zr.h.push_back(v.imag());
    }
    const cplx beta = cplx(cfg.beta_r, cfg.beta_i) / rot;
    std::vector<cplx> xr(z.size());
    for (std::size_t n = 0; n < z.size(); ++n) xr[n] = beta * zr.z(n);
    const double rotated = mbq::rao_statistic(mbq::quantize(xr, kTwoBit), zr, kTwoBit, 2.0);
    EXPECT_NEAR(rotated, mbq::oracle::rao_statistic(mbq::quantize(xr, kTwoBit), zr, kTwoBit, 2.0), 1e-6 * rotated);
    EXPECT_GE(rotated, 0.0);
  }
}

TEST(Glrt, PerfectMatchAndOrthogonal) {
  const EffectiveSignal z{{1.0, 0.5, -0.3}, {0.2, -0.4, 0.9}};
  std::vector<cplx> x(3);
  for (std::size_t n = 0; n < 3; ++n) x[n] = z.z(n);
  EXPECT_NEAR(mbq::glrt_unquantized(x, z, 2.0), z.energy(), 1e-14);

  const EffectiveSignal e{{1.0, 0.0}, {0.0, 0.0}};
  const std::vector<cplx> orth{{0.0, 0.0}, {3.0, -1.0}};
  EXPECT_EQ(mbq::glrt_unquantized(orth, e, 2.0), 0.0);
}

TEST(Glrt, ScaledSignal) {
  mbq::SceneConfig cfg;  // 16 x 8, unit-modulus elements: z^H z = 128
  const auto z = mbq::effective_signal(cfg);
  ASSERT_NEAR(z.energy(), 128.0, 1e-12);
  std::vector<cplx> x(z.size());
  for (std::size_t n = 0; n < z.size(); ++n) x[n] = 0.1 * z.z(n);
  EXPECT_NEAR(mbq::glrt_unquantized(x, z, 2.0), 1.28, 1e-12);
}

TEST(Glrt, ScalesWithSquaredMagnitude) {
  const EffectiveSignal z{{1.0, 0.5}, {0.2, -0.4}};
  const std::vector<cplx> x{{0.3, 1.1}, {-0.7, 0.2}};
  const double base = mbq::glrt_unquantized(x, z, 1.5);
  const cplx c{2.0, -1.0};
  std::vector<cplx> xs{c * x[0], c * x[1]};
  EXPECT_NEAR(mbq::glrt_unquantized(xs, z, 1.5), std::norm(c) * base, 1e-12);
}

TEST(Glrt, ZeroSignalRejected) {
  const EffectiveSignal z{{0.0}, {0.0}};
  const std::vector<cplx> x{{1.0, 0.0}};
  EXPECT_THROW(mbq::glrt_unquantized(x, z, 2.0), mbq::numerical_error);
}

TEST(Decide, StrictComparisonTiesToNull) {
  EXPECT_EQ(mbq::decide(2.0, 4.6052), mbq::Hypothesis::H0);
  EXPECT_EQ(mbq::decide(9.3, 9.2103), mbq::Hypothesis::H1);
  EXPECT_EQ(mbq::decide(9.2103, 9.2103), mbq::Hypothesis::H0);
  const auto o = mbq::make_outcome(5.0, 4.0);
  EXPECT_EQ(o.decision, mbq::Hypothesis::H1);
  EXPECT_EQ(o.threshold, 4.0);
}

}  // namespace
