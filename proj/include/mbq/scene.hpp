#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "mbq/errors.hpp"

namespace mbq {

using cplx = std::complex<double>;

// Array geometry, waveform size and target/noise parameters of one scene.
struct SceneConfig {
  int n_tx = 1;
  int n_rx = 16;
  int snapshots = 8;
  double wavelength = 1.0;
  double spacing = 0.5;
  double angle = 0.0;  // radians
  double noise_power = 2.0;  // total complex variance
  double beta_r = 0.0;
  double beta_i = 0.0;

  int elements() const { return n_rx * snapshots; }
  double beta_norm2() const { return beta_r * beta_r + beta_i * beta_i; }

  void validate() const {
    require(n_tx >= 1, "n_tx must be >= 1");
    require(n_rx >= 1, "n_rx must be >= 1");
    require(snapshots >= 1, "snapshots must be >= 1");
    require(wavelength > 0.0 && std::isfinite(wavelength), "wavelength must be positive");
    require(spacing > 0.0 && std::isfinite(spacing), "spacing must be positive");
    require(std::isfinite(angle), "angle must be finite");
    require(noise_power > 0.0 && std::isfinite(noise_power), "noise_power must be positive");
    require(std::isfinite(beta_r) && std::isfinite(beta_i), "beta must be finite");
  }

  bool operator==(const SceneConfig&) const = default;
};

// SNR = 10 log10(|beta|^2 / sigma^2); -inf for beta = 0.
inline double snr_db(const SceneConfig& cfg) { return 10.0 * std::log10(cfg.beta_norm2() / cfg.noise_power); }

// Returns cfg with a real reflection coefficient giving the requested SNR.
inline SceneConfig with_snr_db(SceneConfig cfg, double snr) {
  cfg.beta_r = std::sqrt(cfg.noise_power * std::pow(10.0, snr / 10.0));
  cfg.beta_i = 0.0;
  return cfg;
}

// Dense row-major complex matrix.
struct ComplexMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<cplx> data;

  ComplexMatrix() = default;
  ComplexMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}

  cplx& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  const cplx& operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols == b.rows, "matrix dimension mismatch");
  ComplexMatrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const cplx aik = a(i, k);
      for (int j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

// Transmit-receive channel matrix A(phi) = a_r a_t^T, N_r x N_t.
// Entry (ir, it) = exp(-j 2 pi (ir + it) d sin(phi) / lambda).
inline ComplexMatrix steering_matrix(const SceneConfig& cfg) {
  cfg.validate();
  const double k = -2.0 * std::numbers::pi * cfg.spacing * std::sin(cfg.angle) / cfg.wavelength;
  ComplexMatrix a(cfg.n_rx, cfg.n_tx);
  for (int ir = 0; ir < cfg.n_rx; ++ir)
    for (int it = 0; it < cfg.n_tx; ++it) a(ir, it) = std::polar(1.0, k * (ir + it));
  return a;
}

// Orthogonal LFM waveform, N_t x L:
//   S(p, l) = exp{j 2 pi p (l-1) / L + j pi (l-1)^2 / L} / N_t,  p = 1..N_t, l = 1..L.
inline ComplexMatrix lfm_waveform(int n_tx, int snapshots) {
  require(n_tx >= 1 && snapshots >= 1, "lfm_waveform: sizes must be >= 1");
  ComplexMatrix s(n_tx, snapshots);
  const double len = snapshots;
  for (int p = 1; p <= n_tx; ++p)
    for (int l = 1; l <= snapshots; ++l) {
      const double m = l - 1;
      const double phase = 2.0 * std::numbers::pi * p * m / len + std::numbers::pi * m * m / len;
      s(p - 1, l - 1) = std::polar(1.0 / n_tx, phase);
    }
  return s;
}

// Noise-free signal z = vec(A(phi) S) split into real part g and imaginary part h.
// Element order is receiver-major: n = ir * L + l.
struct EffectiveSignal {
  std::vector<double> g;
  std::vector<double> h;

  std::size_t size() const { return g.size(); }
  cplx z(std::size_t n) const { return {g[n], h[n]}; }

  double energy() const {
    double e = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) e += g[n] * g[n] + h[n] * h[n];
    return e;
  }
};

inline EffectiveSignal vectorize(const ComplexMatrix& m) {
  EffectiveSignal z;
  z.g.reserve(m.data.size());
  z.h.reserve(m.data.size());
  for (const cplx& v : m.data) {
    z.g.push_back(v.real());
    z.h.push_back(v.imag());
  }
  return z;
}

inline EffectiveSignal effective_signal(const SceneConfig& cfg, const ComplexMatrix& waveform) {
  require(waveform.rows == cfg.n_tx && waveform.cols == cfg.snapshots, "waveform shape does not match scene");
  return vectorize(multiply(steering_matrix(cfg), waveform));
}

inline EffectiveSignal effective_signal(const SceneConfig& cfg) {
  return effective_signal(cfg, lfm_waveform(cfg.n_tx, cfg.snapshots));
}

enum class Hypothesis { H0, H1 };

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t x = (state += 0x9e3779b97f4a7c15ULL);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// xoshiro256** seeded through splitmix64. Satisfies
// UniformRandomBitGenerator; cheap to construct per trial.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  explicit StreamRng(std::uint64_t seed) {
    for (auto& w : s_) w = splitmix64(seed);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// Counter scheme: the generator for (master seed, stream tag, index) is
// seeded by hashing the three words, so a trial's draws depend only on its
// index and never on which worker ran it.
inline StreamRng stream_rng(std::uint64_t master_seed, std::uint32_t stream, std::uint64_t index) {
  std::uint64_t state = master_seed;
  std::uint64_t key = splitmix64(state);
  state = key ^ (static_cast<std::uint64_t>(stream) << 32 | 0x5eedu);
  key = splitmix64(state);
  state = key ^ index;
  return StreamRng(splitmix64(state));
}

enum class NoiseMode { injected, noise_free };

// x_n = beta z_n + w_n under H1 and x_n = w_n under H0, with Re(w_n) and
// Im(w_n) independent N(0, sigma^2/2). In noise_free mode w = 0.
template <class Rng>
std::vector<cplx> synthesize_observation(const SceneConfig& cfg, const EffectiveSignal& z, Hypothesis hyp, Rng& rng,
                                         NoiseMode mode = NoiseMode::injected) {
  require(cfg.noise_power > 0.0, "noise_power must be positive");
  require(z.size() == static_cast<std::size_t>(cfg.elements()), "effective signal does not match scene");
  const cplx beta{cfg.beta_r, cfg.beta_i};
  std::normal_distribution<double> noise(0.0, std::sqrt(cfg.noise_power / 2.0));
  std::vector<cplx> x(z.size());
  for (std::size_t n = 0; n < z.size(); ++n) {
    cplx v = hyp == Hypothesis::H1 ? beta * z.z(n) : cplx{};
    if (mode == NoiseMode::injected) {
      const double re = noise(rng);
      const double im = noise(rng);
      v += cplx{re, im};
    }
    x[n] = v;
  }
  return x;
}

inline std::vector<cplx> synthesize_observation(const SceneConfig& cfg, const EffectiveSignal& z, Hypothesis hyp,
                                                std::uint64_t seed, NoiseMode mode = NoiseMode::injected) {
  auto rng = stream_rng(seed, hyp == Hypothesis::H1 ? 1u : 0u, 0);
  return synthesize_observation(cfg, z, hyp, rng, mode);
}

}  // namespace mbq
