#pragma once

// Brute-force reference for the Rao statistic: numerically differentiated
// quantized log-likelihood and an enumerated Fisher information matrix. It
// shares no code with the closed form in detectors.hpp beyond the threshold
// container and is used by the verification suites and `selftest`.

#include <array>
#include <cmath>
#include <numbers>

#include "mbq/quantizer.hpp"
#include "mbq/scene.hpp"

namespace mbq::oracle {

inline double phi_cdf(double x) {
  if (x == -INFINITY) return 0.0;
  if (x == INFINITY) return 1.0;
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// P(u + w in bin i), w ~ N(0, noise_power / 2).
inline double cell_probability(double u, int i, const ThresholdSet& t, double noise_power) {
  const double s = std::sqrt(noise_power / 2.0);
  return phi_cdf((t.upper(i) - u) / s) - phi_cdf((t.lower(i) - u) / s);
}

// Quantized log-likelihood ln P(Y | beta).
inline double log_likelihood(double beta_r, double beta_i, const QuantizedObservation& y, const EffectiveSignal& z,
                             const ThresholdSet& t, double noise_power) {
  double ll = 0.0;
  for (std::size_t n = 0; n < z.size(); ++n) {
    ll += std::log(cell_probability(beta_r * z.g[n] - beta_i * z.h[n], y.re_bins[n], t, noise_power));
    ll += std::log(cell_probability(beta_r * z.h[n] + beta_i * z.g[n], y.im_bins[n], t, noise_power));
  }
  return ll;
}

inline constexpr double kStep = 1e-3;

// Fourth-order central difference of f at 0.
template <class F>
double central_derivative(F&& f, double h = kStep) {
  return (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
}

inline std::array<double, 2> score(const QuantizedObservation& y, const EffectiveSignal& z, const ThresholdSet& t,
                                   double noise_power) {
  return {central_derivative([&](double e) { return log_likelihood(e, 0.0, y, z, t, noise_power); }),
          central_derivative([&](double e) { return log_likelihood(0.0, e, y, z, t, noise_power); })};
}

using Matrix2 = std::array<std::array<double, 2>, 2>;

// E[score score^T] at beta = 0 by enumerating every bin of every real and
// imaginary component (components are independent).
inline Matrix2 fisher_information(const EffectiveSignal& z, const ThresholdSet& t, double noise_power) {
  Matrix2 fi{};
  for (std::size_t n = 0; n < z.size(); ++n) {
    for (int part = 0; part < 2; ++part) {
      // u(beta) for this component, as a function of (beta_r, beta_i).
      const double dr = part == 0 ? z.g[n] : z.h[n];
      const double di = part == 0 ? -z.h[n] : z.g[n];
      for (int i = 1; i <= t.levels(); ++i) {
        const double p = cell_probability(0.0, i, t, noise_power);
        const double sr =
            central_derivative([&](double e) { return std::log(cell_probability(e * dr, i, t, noise_power)); });
        const double si =
            central_derivative([&](double e) { return std::log(cell_probability(e * di, i, t, noise_power)); });
        fi[0][0] += p * sr * sr;
        fi[0][1] += p * sr * si;
        fi[1][1] += p * si * si;
      }
    }
  }
  fi[1][0] = fi[0][1];
  return fi;
}

// s^T FI^{-1} s with a general 2x2 inverse.
inline double rao_statistic(const QuantizedObservation& y, const EffectiveSignal& z, const ThresholdSet& t,
                            double noise_power) {
  const auto s = oracle::score(y, z, t, noise_power);
  const auto fi = oracle::fisher_information(z, t, noise_power);
  const double det = fi[0][0] * fi[1][1] - fi[0][1] * fi[1][0];
  const double a = fi[1][1] / det;
  const double b = -fi[0][1] / det;
  const double d = fi[0][0] / det;
  return s[0] * (a * s[0] + b * s[1]) + s[1] * (b * s[0] + d * s[1]);
}

}  // namespace mbq::oracle
