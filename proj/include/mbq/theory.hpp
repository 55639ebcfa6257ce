#pragma once

#include <array>

#include "mbq/detectors.hpp"
#include "mbq/quantizer.hpp"
#include "mbq/scene.hpp"
#include "mbq/special.hpp"

namespace mbq {

// 2x2 Fisher information over (beta_R, beta_I) at beta = 0. The off-diagonal
// vanishes identically, so only the diagonal is free.
struct FisherInfo {
  std::array<std::array<double, 2>, 2> m{};

  double diagonal() const { return m[0][0]; }
};

inline FisherInfo fisher_information(const EffectiveSignal& z, const BinStatsTable& stats) {
  const double d = fisher_diagonal(z, stats);
  FisherInfo fi;
  fi.m[0][0] = d;
  fi.m[1][1] = d;
  return fi;
}

inline FisherInfo fisher_information(const EffectiveSignal& z, const ThresholdSet& t, double noise_power) {
  return fisher_information(z, BinStatsTable(t, noise_power));
}

// lambda_F = |beta|^2 * FI_11.
inline double noncentrality(double beta_r, double beta_i, const EffectiveSignal& z, const BinStatsTable& stats) {
  return (beta_r * beta_r + beta_i * beta_i) * fisher_diagonal(z, stats);
}

inline double noncentrality(double beta_r, double beta_i, const EffectiveSignal& z, const ThresholdSet& t,
                            double noise_power) {
  return noncentrality(beta_r, beta_i, z, BinStatsTable(t, noise_power));
}

// lambda_{F-inf} = |beta|^2 z^H z / (sigma^2 / 2).
inline double noncentrality_unquantized(double beta_r, double beta_i, const EffectiveSignal& z, double noise_power) {
  require(noise_power > 0.0, "noise_power must be positive");
  return (beta_r * beta_r + beta_i * beta_i) * z.energy() / (noise_power / 2.0);
}

// Asymptotic detection probability at false-alarm rate p_fa for a statistic
// distributed chi2_2 under H0 and chi'2_2(lambda_f) under H1.
inline double theoretical_pd(double lambda_f, double p_fa) {
  require(lambda_f >= 0.0, "lambda_f must be nonnegative");
  return noncentral_chi2_tail(lambda_f, chi2_quantile(p_fa));
}

}  // namespace mbq
