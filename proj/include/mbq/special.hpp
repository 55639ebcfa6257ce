#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

#include "mbq/errors.hpp"

namespace mbq {

// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) noexcept {
    add(v);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) noexcept {
  CompensatedSum acc;
  for (double v : values) acc += v;
  return acc.value();
}

// Standard normal complementary CDF. Computed through erfc so that the upper
// tail keeps full relative precision (max relative error well below 1e-12).
inline double normal_q(double x) noexcept {
  if (x == -INFINITY) return 1.0;
  if (x == INFINITY) return 0.0;
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

inline double normal_cdf(double x) noexcept { return normal_q(-x); }

// Density of a zero-mean Gaussian with the given variance; 0 at +-inf.
inline double gaussian_pdf(double x, double variance) noexcept {
  if (std::isinf(x)) return 0.0;
  return std::exp(-0.5 * x * x / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

// Global threshold giving false-alarm probability p_fa for a central
// chi-squared statistic with two degrees of freedom.
inline double chi2_quantile(double p_fa) {
  if (!(p_fa > 0.0 && p_fa < 1.0)) throw validation_error("p_fa must lie in (0, 1)");
  return -2.0 * std::log(p_fa);
}

// P(chi2_2 > x).
inline double chi2_tail(double x) noexcept {
  if (x <= 0.0) return 1.0;
  return std::exp(-0.5 * x);
}

// Truncation bound on the Poisson-mixture series below.
inline constexpr double kMarcumTruncation = 1e-17;

// Generalized Marcum Q_1(sqrt(lambda), sqrt(x)) == P(chi'2_2(lambda) > x).
//
// Uses the Poisson mixture
//   Q_1 = sum_j Pois(j; lambda/2) * P(Pois(x/2) <= j).
// Every factor is in [0, 1], so stopping once the remaining Poisson mass of
// the mixing weights drops below kMarcumTruncation bounds the absolute error
// by that amount (plus rounding, well under 1e-10 overall).
inline double noncentral_chi2_tail(double lambda, double x) {
  if (!(lambda >= 0.0) || std::isnan(x)) throw validation_error("noncentral_chi2_tail: bad arguments");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (lambda == 0.0) return chi2_tail(x);

  const double a = 0.5 * lambda;
  const double b = 0.5 * x;
  const double log_a = std::log(a);
  const double log_b = std::log(b);
  const double j_max = a + 40.0 * std::sqrt(a) + 200.0;

  CompensatedSum tail;
  double poisson_cdf_b = 0.0;
  for (double j = 0.0; j <= j_max; j += 1.0) {
    const double lg = std::lgamma(j + 1.0);
    poisson_cdf_b += std::exp(-b + j * log_b - lg);
    const double weight = std::exp(-a + j * log_a - lg);
    tail += weight * std::min(poisson_cdf_b, 1.0);
    if (j > a) {
      // Remaining weights decay at least geometrically with ratio a/(j+1).
      const double ratio = a / (j + 1.0);
      if (weight * ratio / (1.0 - ratio) < kMarcumTruncation) break;
    }
  }
  return std::clamp(tail.value(), 0.0, 1.0);
}

inline double noncentral_chi2_cdf(double lambda, double x) { return 1.0 - noncentral_chi2_tail(lambda, x); }

inline double marcum_q1(double a, double b) { return noncentral_chi2_tail(a * a, b * b); }

}  // namespace mbq
