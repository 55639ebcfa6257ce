#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "mbq/scene.hpp"

namespace {

using mbq::cplx;
using mbq::SceneConfig;

SceneConfig scene(int n_tx, int n_rx, int len, double angle = 0.0) {
  SceneConfig c;
  c.n_tx = n_tx;
  c.n_rx = n_rx;
  c.snapshots = len;
  c.angle = angle;
  return c;
}

TEST(SteeringMatrix, BroadsideIsAllOnes) {
  const auto a = mbq::steering_matrix(scene(3, 5, 4));
  for (const auto& v : a.data) EXPECT_EQ(v, cplx(1.0, 0.0));
}

TEST(SteeringMatrix, SingleAntennaIsIdentity) {
  const auto a = mbq::steering_matrix(scene(1, 1, 1, 0.7));
  ASSERT_EQ(a.data.size(), 1u);
  EXPECT_EQ(a(0, 0), cplx(1.0, 0.0));
}

TEST(SteeringMatrix, EndfireHalfWavelengthAlternates) {
  auto cfg = scene(2, 3, 1, std::numbers::pi / 2);
  cfg.spacing = cfg.wavelength / 2;
  const auto a = mbq::steering_matrix(cfg);
  EXPECT_NEAR(a(1, 0).real(), -1.0, 1e-15);
  EXPECT_NEAR(a(1, 0).imag(), 0.0, 1e-15);
  EXPECT_EQ(a(0, 0), cplx(1.0, 0.0));
}

TEST(SteeringMatrix, UnitModulusAndRankOne) {
  for (double angle : {-1.1, 0.3, 0.9}) {
    const auto a = mbq::steering_matrix(scene(4, 6, 1, angle));
    for (const auto& v : a.data) EXPECT_NEAR(std::abs(v), 1.0, 1e-14);
    for (int r = 0; r + 1 < a.rows; ++r)
      for (int c = 0; c + 1 < a.cols; ++c) {
        const cplx minor = a(r, c) * a(r + 1, c + 1) - a(r, c + 1) * a(r + 1, c);
        EXPECT_LE(std::abs(minor), 1e-12);
      }
  }
}

TEST(SteeringMatrix, RejectsInvalidConfig) {
  auto bad = scene(1, 1, 1);
  bad.wavelength = 0.0;
  EXPECT_THROW(mbq::steering_matrix(bad), mbq::validation_error);
  bad = scene(0, 1, 1);
  EXPECT_THROW(mbq::steering_matrix(bad), mbq::validation_error);
}

TEST(LfmWaveform, FirstSnapshotIsReal) {
  const auto s = mbq::lfm_waveform(4, 8);
  for (int p = 0; p < 4; ++p) EXPECT_EQ(s(p, 0), cplx(0.25, 0.0));
}

TEST(LfmWaveform, ConstantModulus) {
  const auto s = mbq::lfm_waveform(3, 16);
  for (const auto& v : s.data) EXPECT_NEAR(std::abs(v), 1.0 / 3.0, 1e-15);
}

TEST(LfmWaveform, MatchesDirectEvaluation) {
  // exp{j 2 pi / 8 + j pi / 8} / 2, evaluated independently.
  const auto s = mbq::lfm_waveform(2, 8);
  EXPECT_NEAR(s(0, 1).real(), 0.19134171618254492, 1e-15);
  EXPECT_NEAR(s(0, 1).imag(), 0.46193976625564337, 1e-15);
}

TEST(EffectiveSignal, ScalarScene) {
  const auto z = mbq::effective_signal(scene(1, 1, 1));
  ASSERT_EQ(z.size(), 1u);
  EXPECT_EQ(z.g[0], 1.0);
  EXPECT_EQ(z.h[0], 0.0);
}

TEST(EffectiveSignal, BroadsideReplicatesColumnSums) {
  const auto cfg = scene(3, 4, 5);
  const auto s = mbq::lfm_waveform(3, 5);
  const auto z = mbq::effective_signal(cfg);
  ASSERT_EQ(z.size(), 20u);
  for (int r = 0; r < 4; ++r)
    for (int l = 0; l < 5; ++l) {
      cplx sum = s(0, l) + s(1, l) + s(2, l);
      EXPECT_NEAR(z.g[r * 5 + l], sum.real(), 1e-14);
      EXPECT_NEAR(z.h[r * 5 + l], sum.imag(), 1e-14);
    }
}

TEST(EffectiveSignal, MatchesExplicitProductReceiverMajor) {
  const auto cfg = scene(2, 16, 8, 0.4);
  const auto z = mbq::effective_signal(cfg);
  ASSERT_EQ(z.size(), 128u);
  const double k = -2.0 * std::numbers::pi * cfg.spacing * std::sin(cfg.angle) / cfg.wavelength;
  for (int r = 0; r < 16; ++r)
    for (int l = 0; l < 8; ++l) {
      cplx v{};
      for (int p = 0; p < 2; ++p) {
        const double m = l;
        const cplx sv = std::polar(0.5, 2.0 * std::numbers::pi * (p + 1) * m / 8 + std::numbers::pi * m * m / 8);
        v += std::polar(1.0, k * (r + p)) * sv;
      }
      EXPECT_NEAR(z.g[r * 8 + l], v.real(), 1e-13);
      EXPECT_NEAR(z.h[r * 8 + l], v.imag(), 1e-13);
    }
}

TEST(EffectiveSignal, LinearInWaveform) {
  const auto cfg = scene(2, 3, 4, 0.2);
  auto s = mbq::lfm_waveform(2, 4);
  const auto z1 = mbq::effective_signal(cfg, s);
  const cplx c{1.5, -0.5};
  for (auto& v : s.data) v *= c;
  const auto z2 = mbq::effective_signal(cfg, s);
  for (std::size_t n = 0; n < z1.size(); ++n) {
    const cplx want = c * z1.z(n);
    EXPECT_NEAR(z2.g[n], want.real(), 1e-14);
    EXPECT_NEAR(z2.h[n], want.imag(), 1e-14);
  }
}

TEST(Snr, RoundTrips) {
  SceneConfig c;
  c.noise_power = 2.0;
  for (double snr : {-20.0, -14.0, 0.0, 3.5}) EXPECT_NEAR(mbq::snr_db(mbq::with_snr_db(c, snr)), snr, 1e-12);
}

TEST(Synthesis, NoiseFreeGivesScaledSignal) {
  auto cfg = scene(1, 4, 4, 0.3);
  cfg.beta_r = 0.3;
  cfg.beta_i = -0.7;
  const auto z = mbq::effective_signal(cfg);
  const auto x = mbq::synthesize_observation(cfg, z, mbq::Hypothesis::H1, 5, mbq::NoiseMode::noise_free);
  for (std::size_t n = 0; n < z.size(); ++n) {
    const cplx want = cplx(0.3, -0.7) * z.z(n);
    EXPECT_DOUBLE_EQ(x[n].real(), want.real());
    EXPECT_DOUBLE_EQ(x[n].imag(), want.imag());
  }
}

TEST(Synthesis, SameSeedIsBitIdentical) {
  auto cfg = mbq::with_snr_db(scene(1, 16, 8), -10);
  const auto z = mbq::effective_signal(cfg);
  const auto a = mbq::synthesize_observation(cfg, z, mbq::Hypothesis::H1, 99);
  const auto b = mbq::synthesize_observation(cfg, z, mbq::Hypothesis::H1, 99);
  const auto c = mbq::synthesize_observation(cfg, z, mbq::Hypothesis::H1, 100);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Synthesis, RejectsNonPositiveNoise) {
  auto cfg = scene(1, 2, 2);
  const auto z = mbq::effective_signal(cfg);
  cfg.noise_power = 0.0;
  EXPECT_THROW(mbq::synthesize_observation(cfg, z, mbq::Hypothesis::H0, 1), mbq::validation_error);
}

// Re(w) variance sigma^2/2 and Re/Im uncorrelated, within 3 standard errors.
TEST(Synthesis, NoiseMomentsUnderH0) {
  auto cfg = scene(1, 1000, 100);
  cfg.noise_power = 3.0;
  const mbq::EffectiveSignal z{std::vector<double>(100000, 1.0), std::vector<double>(100000, 0.0)};
  const auto x = mbq::synthesize_observation(cfg, z, mbq::Hypothesis::H0, 2024);
  const double n = static_cast<double>(x.size());
  double s2 = 0.0, s4 = 0.0, c = 0.0, c2 = 0.0;
  for (const auto& v : x) {
    s2 += v.real() * v.real();
    s4 += std::pow(v.real(), 4);
    c += v.real() * v.imag();
    c2 += std::pow(v.real() * v.imag(), 2);
  }
  const double var = s2 / n;
  const double se_var = std::sqrt((s4 / n - var * var) / n);
  EXPECT_NEAR(var, 1.5, 3.0 * se_var);
  const double cov = c / n;
  EXPECT_NEAR(cov, 0.0, 3.0 * std::sqrt((c2 / n) / n));
}

TEST(StreamRng, DependsOnlyOnSeedStreamAndIndex) {
  auto a = mbq::stream_rng(1, 0, 5);
  auto b = mbq::stream_rng(1, 0, 5);
  auto c = mbq::stream_rng(1, 1, 5);
  auto d = mbq::stream_rng(1, 0, 6);
  const auto va = a();
  EXPECT_EQ(va, b());
  EXPECT_NE(va, c());
  EXPECT_NE(va, d());
}

}  // namespace
