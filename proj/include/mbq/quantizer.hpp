#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mbq/errors.hpp"
#include "mbq/special.hpp"

namespace mbq {

inline constexpr int kMaxBits = 16;

// Bit depth q plus strictly increasing interior thresholds tau_1..tau_{2^q-1}.
// tau_0 = -inf and tau_{2^q} = +inf are implicit.
class ThresholdSet {
 public:
  ThresholdSet() = default;

  ThresholdSet(int bits, std::vector<double> interior) : bits_(bits), interior_(std::move(interior)) {
    require(bits >= 1 && bits <= kMaxBits, "bit depth out of range");
    require(interior_.size() == static_cast<std::size_t>(levels() - 1),
            "expected " + std::to_string(levels() - 1) + " interior thresholds for q=" + std::to_string(bits));
    for (double t : interior_) require(std::isfinite(t), "thresholds must be finite");
    for (std::size_t k = 1; k < interior_.size(); ++k)
      require(interior_[k - 1] < interior_[k], "thresholds must be strictly increasing");
  }

  int bits() const { return bits_; }
  int levels() const { return 1 << bits_; }
  const std::vector<double>& interior() const { return interior_; }

  // Bin i (1-based) covers (lower(i), upper(i)].
  double lower(int i) const { return i <= 1 ? -std::numeric_limits<double>::infinity() : interior_[i - 2]; }
  double upper(int i) const { return i >= levels() ? std::numeric_limits<double>::infinity() : interior_[i - 1]; }

  bool operator==(const ThresholdSet&) const = default;

 private:
  int bits_ = 0;
  std::vector<double> interior_;
};

// Equally spaced thresholds over [-radius, radius]: tau_k = -radius + 2 radius k / 2^q.
inline ThresholdSet uniform_thresholds(int bits, double radius) {
  const int levels = 1 << bits;
  std::vector<double> t(levels - 1);
  for (int k = 1; k < levels; ++k) t[k - 1] = -radius + 2.0 * radius * k / levels;
  return {bits, std::move(t)};
}

// Bin index i in 1..2^q with tau_{i-1} < x <= tau_i.
inline int quantize_value(double x, const ThresholdSet& t) {
  const auto& tau = t.interior();
  return 1 + static_cast<int>(std::lower_bound(tau.begin(), tau.end(), x) - tau.begin());
}

// A point strictly inside bin i.
inline double bin_representative(int i, const ThresholdSet& t) {
  if (i == 1) return t.upper(1) - 1.0;
  if (i == t.levels()) return t.lower(i) + 1.0;
  return 0.5 * (t.lower(i) + t.upper(i));
}

struct QuantizedObservation {
  int bits = 0;
  std::vector<int> re_bins;
  std::vector<int> im_bins;

  std::size_t size() const { return re_bins.size(); }
};

inline QuantizedObservation quantize(std::span<const std::complex<double>> x, const ThresholdSet& t) {
  QuantizedObservation y;
  y.bits = t.bits();
  y.re_bins.reserve(x.size());
  y.im_bins.reserve(x.size());
  for (const auto& v : x) {
    y.re_bins.push_back(quantize_value(v.real(), t));
    y.im_bins.push_back(quantize_value(v.imag(), t));
  }
  return y;
}

// q-character codeword for bin i: bin 1 -> "00", bin 4 -> "11" for q = 2.
inline std::string codeword(int bin, int bits) {
  std::string s(bits, '0');
  const unsigned v = static_cast<unsigned>(bin - 1);
  for (int b = 0; b < bits; ++b)
    if (v & (1u << b)) s[bits - 1 - b] = '1';
  return s;
}

// F_i(u) = P(u + w in (tau_{i-1}, tau_i]) with w ~ N(0, sigma^2/2).
inline double bin_probability(double u, int i, const ThresholdSet& t, double noise_power) {
  require(noise_power > 0.0, "noise_power must be positive");
  const double s = std::sqrt(noise_power / 2.0);
  const double lo = (t.lower(i) - u) / s;
  const double hi = (t.upper(i) - u) / s;
  // Difference of whichever tail is small keeps relative precision far out.
  if (lo >= 0.0) return normal_q(lo) - normal_q(hi);
  if (hi <= 0.0) return normal_cdf(hi) - normal_cdf(lo);
  return 1.0 - normal_q(hi) - normal_cdf(lo);
}

struct BinDerivatives {
  double f1;
  double f2;
};

// First and second derivatives of F_i(u) with respect to u.
inline BinDerivatives bin_derivatives(double u, int i, const ThresholdSet& t, double noise_power) {
  require(noise_power > 0.0, "noise_power must be positive");
  const double var = noise_power / 2.0;
  const double lo = t.lower(i) - u;
  const double hi = t.upper(i) - u;
  const double p_lo = gaussian_pdf(lo, var);
  const double p_hi = gaussian_pdf(hi, var);
  const double d_lo = std::isinf(lo) ? 0.0 : lo / var * p_lo;
  const double d_hi = std::isinf(hi) ? 0.0 : hi / var * p_hi;
  return {p_lo - p_hi, d_lo - d_hi};
}

struct BinStats {
  double f;
  double f1;
  double f2;
};

inline constexpr double kDefaultBinFloor = 1e-300;

// Per-bin (F, F', F'') at u = 0, shared by every element because all
// elements use the same thresholds and noise level. Immutable once built.
class BinStatsTable {
 public:
  BinStatsTable(const ThresholdSet& t, double noise_power, double floor = kDefaultBinFloor) {
    require(noise_power > 0.0, "noise_power must be positive");
    std::vector<BinStats> bins;
    bins.reserve(t.levels());
    for (int i = 1; i <= t.levels(); ++i) {
      const auto d = bin_derivatives(0.0, i, t, noise_power);
      bins.push_back({bin_probability(0.0, i, t, noise_power), d.f1, d.f2});
    }
    init(std::move(bins), floor);
  }

  // Build from explicit per-bin values (bin 1 first).
  explicit BinStatsTable(std::vector<BinStats> bins, double floor = kDefaultBinFloor) { init(std::move(bins), floor); }

  int levels() const { return static_cast<int>(bins_.size()); }
  const BinStats& operator[](int bin) const { return bins_[bin - 1]; }
  const std::vector<BinStats>& bins() const { return bins_; }

  // F'_i / F_i.
  double score_ratio(int bin) const { return ratio_[bin - 1]; }

  // ((F'_i)^2 - F''_i F_i) / F_i.
  double information_weight(int bin) const { return weight_[bin - 1]; }

  // Sum over bins of information_weight: Fisher information per unit of
  // signal energy sum(g^2 + h^2).
  double information_per_energy() const { return info_per_energy_; }

 private:
  void init(std::vector<BinStats> bins, double floor) {
    require(!bins.empty(), "empty bin table");
    bins_ = std::move(bins);
    CompensatedSum total;
    for (std::size_t k = 0; k < bins_.size(); ++k) {
      const auto& b = bins_[k];
      if (!(b.f >= floor)) throw degenerate_bin_error(static_cast<int>(k + 1), b.f);
      ratio_.push_back(b.f1 / b.f);
      weight_.push_back((b.f1 * b.f1 - b.f2 * b.f) / b.f);
      total += weight_.back();
    }
    info_per_energy_ = total.value();
  }

  std::vector<BinStats> bins_;
  std::vector<double> ratio_;
  std::vector<double> weight_;
  double info_per_energy_ = 0.0;
};

// Round-trip text for a double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// One-line text form "q; tau_1,...,tau_{2^q-1}" at round-trip precision.
inline std::string format_thresholds(const ThresholdSet& t) {
  std::string out = std::to_string(t.bits()) + ";";
  for (std::size_t k = 0; k < t.interior().size(); ++k) {
    out += (k == 0 ? " " : ",");
    out += format_double(t.interior()[k]);
  }
  return out;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(std::string_view text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw validation_error("not a number: '" + s + "'");
  return v;
}

inline ThresholdSet parse_thresholds(std::string_view line) {
  const auto semi = line.find(';');
  require(semi != std::string_view::npos, "threshold line must look like 'q; t1,t2,...'");
  const double q = parse_double(line.substr(0, semi));
  require(q == std::floor(q) && q >= 1 && q <= kMaxBits, "bad bit depth in threshold line");
  std::vector<double> interior;
  std::string_view rest = line.substr(semi + 1);
  while (!trim(rest).empty()) {
    const auto comma = rest.find(',');
    interior.push_back(parse_double(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return {static_cast<int>(q), std::move(interior)};
}

}  // namespace mbq
