#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "mbq/detectors.hpp"
#include "mbq/errors.hpp"
#include "mbq/quantizer.hpp"
#include "mbq/scene.hpp"
#include "mbq/special.hpp"
#include "mbq/theory.hpp"

namespace mbq {

enum class DetectorKind { rao_qbit, glrt_inf };

struct DetectorSpec {
  DetectorKind kind = DetectorKind::glrt_inf;
  ThresholdSet thresholds;  // rao_qbit only

  static DetectorSpec rao(ThresholdSet t) { return {DetectorKind::rao_qbit, std::move(t)}; }
  static DetectorSpec glrt() { return {DetectorKind::glrt_inf, {}}; }

  std::string name() const { return kind == DetectorKind::rao_qbit ? "rao" : "glrt_inf"; }
  std::string bits_label() const { return kind == DetectorKind::rao_qbit ? std::to_string(thresholds.bits()) : "inf"; }

  bool operator==(const DetectorSpec&) const = default;
};

struct TrialConfig {
  long n_trials_h0 = 100000;
  long n_trials_h1 = 100000;
  std::uint64_t seed = 1;
  std::vector<DetectorSpec> detectors;
  SceneConfig scene;
  int workers = 0;  // 0: hardware concurrency

  void validate() const {
    require(n_trials_h0 >= 1 && n_trials_h1 >= 1, "trial counts must be >= 1");
    require(!detectors.empty(), "at least one detector is required");
    scene.validate();
  }
};

inline int resolve_workers(int workers) {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Evaluates every detector on the same synthesized observation.
class DetectorBank {
 public:
  DetectorBank(const std::vector<DetectorSpec>& detectors, double noise_power) : specs_(detectors) {
    for (const auto& d : specs_)
      if (d.kind == DetectorKind::rao_qbit)
        tables_.emplace_back(d.thresholds, noise_power);
      else
        tables_.emplace_back(std::vector<BinStats>{{1.0, 0.0, 0.0}});
  }

  std::size_t size() const { return specs_.size(); }
  const BinStatsTable& table(std::size_t d) const { return tables_[d]; }

  void evaluate(std::span<const cplx> x, const EffectiveSignal& z, double noise_power, std::span<double> out) const {
    for (std::size_t d = 0; d < specs_.size(); ++d) {
      if (specs_[d].kind == DetectorKind::glrt_inf)
        out[d] = glrt_unquantized(x, z, noise_power);
      else
        out[d] = rao_statistic(quantize(x, specs_[d].thresholds), z, tables_[d]);
    }
  }

 private:
  std::vector<DetectorSpec> specs_;
  std::vector<BinStatsTable> tables_;
};

// Stream tags: H0 trials use 0, H1 trials at sweep point k use 1 + k.
inline constexpr std::uint32_t kStreamH0 = 0;
inline constexpr std::uint32_t stream_h1(std::size_t sweep_point = 0) {
  return 1u + static_cast<std::uint32_t>(sweep_point);
}

// samples[d][i] = statistic of detector d on trial i. Trial i draws from
// stream_rng(seed, stream, i), so the result does not depend on `workers`.
inline std::vector<std::vector<double>> run_hypothesis(const SceneConfig& scene, const EffectiveSignal& z,
                                                       const DetectorBank& bank, Hypothesis hyp, long n_trials,
                                                       std::uint64_t seed, std::uint32_t stream, int workers) {
  std::vector<std::vector<double>> samples(bank.size(), std::vector<double>(static_cast<std::size_t>(n_trials)));
  const int nw = std::min<long>(resolve_workers(workers), std::max(1L, n_trials));
  std::vector<std::exception_ptr> errors(nw);

  auto work = [&](int w) {
    try {
      std::vector<double> out(bank.size());
      for (long i = w; i < n_trials; i += nw) {
        auto rng = stream_rng(seed, stream, static_cast<std::uint64_t>(i));
        const auto x = synthesize_observation(scene, z, hyp, rng);
        bank.evaluate(x, z, scene.noise_power, out);
        for (std::size_t d = 0; d < bank.size(); ++d) samples[d][i] = out[d];
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (nw == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return samples;
}

struct TrialSamples {
  std::vector<std::vector<double>> h0;  // [detector][trial]
  std::vector<std::vector<double>> h1;
};

inline TrialSamples run_trials(const TrialConfig& cfg) {
  cfg.validate();
  const auto z = effective_signal(cfg.scene);
  const DetectorBank bank(cfg.detectors, cfg.scene.noise_power);
  return {run_hypothesis(cfg.scene, z, bank, Hypothesis::H0, cfg.n_trials_h0, cfg.seed, kStreamH0, cfg.workers),
          run_hypothesis(cfg.scene, z, bank, Hypothesis::H1, cfg.n_trials_h1, cfg.seed, stream_h1(), cfg.workers)};
}

struct RocPoint {
  double eta;
  double p_fa_hat;
  double p_d_hat;
  long n0;
  long n1;
};

struct TheoryPoint {
  double p_fa;
  double p_d;
};

struct RocCurve {
  std::vector<RocPoint> points;
  std::vector<TheoryPoint> theory;
};

// Fraction of a sorted sample strictly above eta.
inline double exceed_fraction(const std::vector<double>& sorted, double eta) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), eta);
  return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

// Smallest sample value with at most floor(p * n) sample values above it.
inline double empirical_threshold(const std::vector<double>& sorted, double p_fa) {
  require(!sorted.empty(), "empty sample");
  const auto n = static_cast<long>(sorted.size());
  const long above = std::clamp(static_cast<long>(std::floor(p_fa * static_cast<double>(n))), 0L, n - 1);
  return sorted[n - 1 - above];
}

inline std::vector<double> sorted_copy(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Empirical ROC on an explicit eta grid. lambda_f feeds the theory columns.
inline RocCurve estimate_roc(const std::vector<double>& h0, const std::vector<double>& h1,
                             const std::vector<double>& eta_grid, double lambda_f = 0.0) {
  if (h0.empty() || h1.empty()) throw validation_error("estimate_roc: empty sample");
  const auto s0 = sorted_copy(h0);
  const auto s1 = sorted_copy(h1);
  RocCurve roc;
  for (double eta : eta_grid) {
    roc.points.push_back({eta, exceed_fraction(s0, eta), exceed_fraction(s1, eta), static_cast<long>(h0.size()),
                          static_cast<long>(h1.size())});
    const double p_fa = chi2_tail(eta);
    roc.theory.push_back({p_fa, eta <= 0.0 ? 1.0 : noncentral_chi2_tail(lambda_f, eta)});
  }
  return roc;
}

// Empirical ROC on a P_FA grid: eta per point is the empirical (1 - p_fa)
// quantile of the H0 sample.
inline RocCurve estimate_roc_pfa(const std::vector<double>& h0, const std::vector<double>& h1,
                                 const std::vector<double>& p_fa_grid, double lambda_f = 0.0) {
  if (h0.empty() || h1.empty()) throw validation_error("estimate_roc: empty sample");
  const auto s0 = sorted_copy(h0);
  std::vector<double> etas;
  etas.reserve(p_fa_grid.size());
  for (double p : p_fa_grid) {
    require(p > 0.0 && p < 1.0, "p_fa grid values must lie in (0, 1)");
    etas.push_back(empirical_threshold(s0, p));
  }
  return estimate_roc(h0, h1, etas, lambda_f);
}

// Lambda used by the theory columns of a detector.
inline double detector_noncentrality(const DetectorSpec& d, const SceneConfig& scene, const EffectiveSignal& z) {
  if (d.kind == DetectorKind::glrt_inf) return noncentrality_unquantized(scene.beta_r, scene.beta_i, z, scene.noise_power);
  return noncentrality(scene.beta_r, scene.beta_i, z, d.thresholds, scene.noise_power);
}

struct SweepRow {
  std::string detector;
  std::string bits;
  double snr_db;
  double p_fa_target;
  double eta_asymptotic;
  double p_d_at_asymptotic_eta;
  double p_d_at_empirical_eta;
  long trials;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;
};

// Detection probability versus SNR. The H0 sample does not depend on SNR and
// is drawn once; H1 trials at grid point k use stream_h1(k).
inline SweepResult pd_vs_snr(const SceneConfig& scene_template, const std::vector<double>& snr_grid_db, double p_fa,
                             const std::vector<DetectorSpec>& detectors, long trials, std::uint64_t seed,
                             int workers = 0) {
  scene_template.validate();
  require(!snr_grid_db.empty(), "empty SNR grid");
  require(!detectors.empty(), "at least one detector is required");
  require(trials >= 1, "trials must be >= 1");
  const double eta = chi2_quantile(p_fa);

  SweepResult result;
  if (p_fa * static_cast<double>(trials) < 100.0)
    result.warnings.push_back("p_fa * trials = " + format_double(p_fa * trials) +
                              " < 100: empirical thresholds are unreliable");

  const auto z = effective_signal(scene_template);
  const DetectorBank bank(detectors, scene_template.noise_power);
  const auto h0 = run_hypothesis(scene_template, z, bank, Hypothesis::H0, trials, seed, kStreamH0, workers);
  std::vector<double> emp_eta;
  for (const auto& s : h0) emp_eta.push_back(empirical_threshold(sorted_copy(s), p_fa));

  for (std::size_t k = 0; k < snr_grid_db.size(); ++k) {
    const SceneConfig scene = with_snr_db(scene_template, snr_grid_db[k]);
    const auto h1 = run_hypothesis(scene, z, bank, Hypothesis::H1, trials, seed, stream_h1(k), workers);
    for (std::size_t d = 0; d < detectors.size(); ++d) {
      const auto s1 = sorted_copy(h1[d]);
      result.rows.push_back({detectors[d].name(), detectors[d].bits_label(), snr_grid_db[k], p_fa, eta,
                             exceed_fraction(s1, eta), exceed_fraction(s1, emp_eta[d]), trials});
    }
  }
  return result;
}

}  // namespace mbq
