#pragma once

#include <complex>
#include <span>

#include "mbq/errors.hpp"
#include "mbq/quantizer.hpp"
#include "mbq/scene.hpp"
#include "mbq/special.hpp"

namespace mbq {

// Gradient of the quantized log-likelihood with respect to (beta_R, beta_I)
// at beta = 0. Each element contributes through the single bin its real and
// imaginary parts fell into.
struct Score {
  double d_beta_r = 0.0;
  double d_beta_i = 0.0;
};

inline Score rao_score(const QuantizedObservation& y, const EffectiveSignal& z, const BinStatsTable& stats) {
  require(y.size() == z.size(), "observation and signal lengths differ");
  require(y.im_bins.size() == y.re_bins.size(), "malformed quantized observation");
  CompensatedSum s_r;
  CompensatedSum s_i;
  for (std::size_t n = 0; n < z.size(); ++n) {
    const double r1 = stats.score_ratio(y.re_bins[n]);
    const double r2 = stats.score_ratio(y.im_bins[n]);
    s_r += z.g[n] * r1 + z.h[n] * r2;
    s_i += z.g[n] * r2 - z.h[n] * r1;
  }
  return {s_r.value(), s_i.value()};
}

// Fisher information diagonal sum_n (g_n^2 + h_n^2) * sum_i ((F'_i)^2 - F''_i F_i) / F_i.
inline double fisher_diagonal(const EffectiveSignal& z, const BinStatsTable& stats) {
  CompensatedSum energy;
  for (std::size_t n = 0; n < z.size(); ++n) energy += z.g[n] * z.g[n] + z.h[n] * z.h[n];
  return energy.value() * stats.information_per_energy();
}

// Closed-form multi-bit Rao statistic: (score_R^2 + score_I^2) / FI_11.
inline double rao_statistic(const QuantizedObservation& y, const EffectiveSignal& z, const BinStatsTable& stats) {
  require(stats.levels() == (1 << y.bits), "bin table does not match quantizer bit depth");
  const double denom = fisher_diagonal(z, stats);
  if (!(denom > 0.0)) throw numerical_error("rao_statistic: signal has zero energy");
  const Score s = rao_score(y, z, stats);
  return (s.d_beta_r * s.d_beta_r + s.d_beta_i * s.d_beta_i) / denom;
}

inline double rao_statistic(const QuantizedObservation& y, const EffectiveSignal& z, const ThresholdSet& t,
                            double noise_power) {
  return rao_statistic(y, z, BinStatsTable(t, noise_power));
}

// Unquantized GLRT: |z^H x|^2 / (z^H z * sigma^2 / 2).
inline double glrt_unquantized(std::span<const cplx> x, const EffectiveSignal& z, double noise_power) {
  require(x.size() == z.size(), "observation and signal lengths differ");
  require(noise_power > 0.0, "noise_power must be positive");
  CompensatedSum energy;
  CompensatedSum proj_re;
  CompensatedSum proj_im;
  for (std::size_t n = 0; n < z.size(); ++n) {
    const cplx p = std::conj(z.z(n)) * x[n];
    proj_re += p.real();
    proj_im += p.imag();
    energy += z.g[n] * z.g[n] + z.h[n] * z.h[n];
  }
  const double e = energy.value();
  if (!(e > 0.0)) throw numerical_error("glrt_unquantized: signal has zero energy");
  const double pr = proj_re.value();
  const double pi = proj_im.value();
  return (pr * pr + pi * pi) / (e * noise_power / 2.0);
}

struct DetectorOutcome {
  double statistic;
  double threshold;
  Hypothesis decision;
};

// H1 iff statistic > eta; ties go to H0.
inline Hypothesis decide(double statistic, double eta) { return statistic > eta ? Hypothesis::H1 : Hypothesis::H0; }

inline DetectorOutcome make_outcome(double statistic, double eta) { return {statistic, eta, decide(statistic, eta)}; }

}  // namespace mbq
