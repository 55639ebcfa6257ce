#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mbq/detectors.hpp"
#include "mbq/montecarlo.hpp"
#include "mbq/oracle.hpp"
#include "mbq/pso.hpp"
#include "mbq/theory.hpp"

namespace mbq {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity
  double tolerance = 0.0;  // allowed deviation
  std::string detail;
};

// A small randomized Rao instance: arbitrary signal, thresholds, noise level
// and one quantized observation drawn under a random reflection coefficient.
struct RaoInstance {
  EffectiveSignal z;
  ThresholdSet thresholds;
  double noise_power = 2.0;
  QuantizedObservation y;
};

inline RaoInstance make_rao_instance(StreamRng& rng, int max_elements = 8, int max_bits = 3) {
  std::uniform_int_distribution<int> len(1, max_elements);
  std::uniform_int_distribution<int> bits(1, max_bits);
  std::uniform_real_distribution<double> noise(0.5, 4.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  RaoInstance inst;
  const int n = len(rng);
  const int q = bits(rng);
  inst.noise_power = noise(rng);
  for (int k = 0; k < n; ++k) {
    inst.z.g.push_back(gauss(rng));
    inst.z.h.push_back(gauss(rng));
  }
  std::vector<double> tau((1 << q) - 1);
  const double spread = std::sqrt(inst.noise_power / 2.0);
  for (;;) {
    for (double& v : tau) v = 1.2 * spread * gauss(rng);
    std::sort(tau.begin(), tau.end());
    if (std::adjacent_find(tau.begin(), tau.end(), [](double a, double b) { return b - a < 1e-3; }) == tau.end()) break;
  }
  inst.thresholds = ThresholdSet(q, tau);

  const cplx beta{0.7 * gauss(rng), 0.7 * gauss(rng)};
  std::vector<cplx> x(n);
  for (int k = 0; k < n; ++k) x[k] = beta * inst.z.z(k) + cplx{spread * gauss(rng), spread * gauss(rng)};
  inst.y = quantize(x, inst.thresholds);
  return inst;
}

struct OracleComparison {
  double max_relative_error = 0.0;
  int instances = 0;
};

// Closed-form statistic (from `table_for`) against the finite-difference
// score / enumerated Fisher information reference.
template <class TableFor>
OracleComparison compare_with_oracle(int instances, std::uint64_t seed, TableFor&& table_for) {
  StreamRng rng = stream_rng(seed, 0x0aac1eu, 0);
  OracleComparison out;
  for (int k = 0; k < instances; ++k) {
    const auto inst = make_rao_instance(rng);
    const double closed = rao_statistic(inst.y, inst.z, table_for(inst.thresholds, inst.noise_power));
    const double ref = oracle::rao_statistic(inst.y, inst.z, inst.thresholds, inst.noise_power);
    out.max_relative_error = std::max(out.max_relative_error, std::abs(closed - ref) / std::abs(ref));
    ++out.instances;
  }
  return out;
}

inline OracleComparison compare_with_oracle(int instances, std::uint64_t seed) {
  return compare_with_oracle(instances, seed, [](const ThresholdSet& t, double np) { return BinStatsTable(t, np); });
}

// Sample moments of the score at beta = 0 over H0 trials.
struct ScoreMoments {
  double var_r = 0.0;
  double var_i = 0.0;
  double cov = 0.0;
  double se_var_r = 0.0;
  double se_var_i = 0.0;
  double se_cov = 0.0;
  long trials = 0;
};

inline ScoreMoments score_moments(const SceneConfig& scene, const ThresholdSet& t, long trials, std::uint64_t seed) {
  const auto z = effective_signal(scene);
  const BinStatsTable table(t, scene.noise_power);
  std::vector<double> sr(trials);
  std::vector<double> si(trials);
  for (long k = 0; k < trials; ++k) {
    auto rng = stream_rng(seed, kStreamH0, static_cast<std::uint64_t>(k));
    const auto x = synthesize_observation(scene, z, Hypothesis::H0, rng);
    const auto s = rao_score(quantize(x, t), z, table);
    sr[k] = s.d_beta_r;
    si[k] = s.d_beta_i;
  }
  // The score has zero mean under H0, so the raw second moments are unbiased.
  auto moments = [&](const std::vector<double>& a, const std::vector<double>& b, double& m, double& se) {
    CompensatedSum m1;
    CompensatedSum m2;
    for (long k = 0; k < trials; ++k) {
      const double p = a[k] * b[k];
      m1 += p;
      m2 += p * p;
    }
    const double n = static_cast<double>(trials);
    m = m1.value() / n;
    se = std::sqrt(std::max(0.0, m2.value() / n - m * m) / n);
  };
  ScoreMoments out;
  out.trials = trials;
  moments(sr, sr, out.var_r, out.se_var_r);
  moments(si, si, out.var_i, out.se_var_i);
  moments(sr, si, out.cov, out.se_cov);
  return out;
}

struct SelftestOptions {
  std::uint64_t seed = 20240601;
  long null_trials = 20000;
  int oracle_instances = 100;
  // Multiplies every F' in the closed-form table; 1.0 = unmodified. Used to
  // confirm the oracle check catches a corrupted detector.
  double f1_scale = 1.0;
};

inline std::vector<CheckResult> run_selftest(const SelftestOptions& opt = {}) {
  std::vector<CheckResult> out;
  const SceneConfig scene;
  const auto z = effective_signal(scene);

  // Null moments of the 2-bit statistic against chi2_2 (mean 2, variance 4).
  {
    PsoConfig pso;
    pso.seed = opt.seed;
    const auto t = optimize_thresholds(2, z, scene.noise_power, pso).thresholds;
    TrialConfig tc;
    tc.n_trials_h0 = opt.null_trials;
    tc.n_trials_h1 = 1;
    tc.seed = opt.seed;
    tc.detectors = {DetectorSpec::rao(t)};
    tc.scene = scene;
    tc.workers = 1;
    const auto s = run_trials(tc).h0[0];
    CompensatedSum m1;
    for (double v : s) m1 += v;
    const double n = static_cast<double>(s.size());
    const double mean = m1.value() / n;
    CompensatedSum m2;
    for (double v : s) m2 += (v - mean) * (v - mean);
    const double var = m2.value() / (n - 1.0);
    const double tol_mean = 4.0 * 2.0 / std::sqrt(n);
    const double tol_var = 4.0 * std::sqrt(128.0 / n);
    out.push_back({"null_mean", std::abs(mean - 2.0) <= tol_mean, mean, tol_mean, "chi2_2 mean 2"});
    out.push_back({"null_variance", std::abs(var - 4.0) <= tol_var, var, tol_var, "chi2_2 variance 4"});
  }

  // One-bit sign quantizer loses exactly 2/pi of the unquantized information.
  {
    const ThresholdSet sign(1, {0.0});
    const double ratio = noncentrality(1.0, 0.0, z, sign, scene.noise_power) /
                         noncentrality_unquantized(1.0, 0.0, z, scene.noise_power);
    const double err = std::abs(ratio - 2.0 / std::numbers::pi);
    out.push_back({"one_bit_ratio", err <= 1e-12, ratio, 1e-12, "lambda_F / lambda_F_inf = 2/pi"});
  }

  // Fisher off-diagonal: zero analytically, and empirically within 4 SE.
  {
    const ThresholdSet t(2, {-0.978, -0.008, 0.967});
    const auto fi = fisher_information(z, t, scene.noise_power);
    out.push_back({"fisher_offdiag_exact", fi.m[0][1] == 0.0 && fi.m[1][0] == 0.0, fi.m[0][1], 0.0, ""});
    const auto mom = score_moments(scene, t, opt.null_trials, opt.seed);
    out.push_back({"fisher_offdiag_empirical", std::abs(mom.cov) <= 4.0 * mom.se_cov, mom.cov, 4.0 * mom.se_cov,
                   "E[score_R score_I] = 0"});
    const double dev = std::abs(mom.var_r - fi.diagonal());
    out.push_back({"fisher_diagonal_empirical", dev <= 4.0 * mom.se_var_r, mom.var_r, 4.0 * mom.se_var_r,
                   "E[score_R^2] = FI_11 = " + format_double(fi.diagonal())});
  }

  // Closed form against the brute-force score/FI construction.
  {
    const double scale = opt.f1_scale;
    const auto cmp = compare_with_oracle(opt.oracle_instances, opt.seed, [scale](const ThresholdSet& t, double np) {
      BinStatsTable base(t, np);
      if (scale == 1.0) return base;
      auto bins = base.bins();
      for (auto& b : bins) b.f1 *= scale;
      return BinStatsTable(std::move(bins));
    });
    out.push_back({"rao_oracle", cmp.max_relative_error <= 1e-6, cmp.max_relative_error, 1e-6,
                   std::to_string(cmp.instances) + " random instances"});
  }
  return out;
}

}  // namespace mbq
