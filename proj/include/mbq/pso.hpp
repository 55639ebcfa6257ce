#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mbq/detectors.hpp"
#include "mbq/errors.hpp"
#include "mbq/quantizer.hpp"
#include "mbq/scene.hpp"

namespace mbq {

struct PsoConfig {
  int swarm_size = 50;
  int max_iters = 500;
  double inertia = 0.72;
  double cognitive = 1.49;
  double social = 1.49;
  std::uint64_t seed = 1;
  double stall_tol = 1e-9;  // relative gbest improvement over stall_window iterations
  int stall_window = 50;
  std::optional<double> search_radius;  // default 5 sigma / sqrt(2)

  double radius_for(double noise_power) const {
    return search_radius.value_or(5.0 * std::sqrt(noise_power / 2.0));
  }

  void validate() const {
    require(swarm_size >= 2, "swarm_size must be >= 2");
    require(max_iters >= 1, "max_iters must be >= 1");
    require(stall_window >= 1, "stall_window must be >= 1");
    require(std::isfinite(inertia) && std::isfinite(cognitive) && std::isfinite(social),
            "PSO coefficients must be finite");
    require(std::isfinite(stall_tol) && stall_tol >= 0.0, "stall_tol must be finite and nonnegative");
    if (search_radius) require(*search_radius > 0.0 && std::isfinite(*search_radius), "search box is empty");
  }

  bool operator==(const PsoConfig&) const = default;
};

// Threshold-dependent part of lambda_F (lambda_F / |beta|^2). Degenerate
// threshold sets score -inf so the swarm can move away from them.
inline double objective(const ThresholdSet& t, const EffectiveSignal& z, double noise_power) {
  try {
    return fisher_diagonal(z, BinStatsTable(t, noise_power));
  } catch (const degenerate_bin_error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

inline double objective(std::span<const double> interior, int bits, const EffectiveSignal& z, double noise_power) {
  try {
    return objective(ThresholdSet(bits, {interior.begin(), interior.end()}), z, noise_power);
  } catch (const validation_error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

inline constexpr double kMinThresholdGap = 1e-9;

// Sort ascending, clamp into [-radius, radius] and separate collisions so
// the position is strictly increasing.
inline void repair_position(std::vector<double>& x, double radius) {
  for (double& v : x) v = std::clamp(v, -radius, radius);
  std::sort(x.begin(), x.end());
  for (std::size_t k = 1; k < x.size(); ++k)
    if (x[k] <= x[k - 1]) x[k] = x[k - 1] + kMinThresholdGap;
}

struct PsoResult {
  ThresholdSet thresholds;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // gbest objective after each iteration
};

// Maximize the Fisher-information objective over strictly increasing
// interior thresholds with a global-best particle swarm.
inline PsoResult optimize_thresholds(int bits, const EffectiveSignal& z, double noise_power, const PsoConfig& cfg) {
  cfg.validate();
  require(bits >= 1 && bits <= kMaxBits, "bit depth out of range");
  require(noise_power > 0.0, "noise_power must be positive");

  const int dim = (1 << bits) - 1;
  const int n = cfg.swarm_size;
  const double radius = cfg.radius_for(noise_power);
  const double vmax = radius;
  StreamRng rng = stream_rng(cfg.seed, 0x50534fu, static_cast<std::uint64_t>(bits));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::vector<double>> pos(n, std::vector<double>(dim));
  std::vector<std::vector<double>> vel(n, std::vector<double>(dim));
  const int grids = n / 2;
  for (int p = 0; p < n; ++p) {
    if (p < grids) {
      // Symmetric uniform grids with half-widths radius * (grids - p) / grids;
      // p = 0 is the canonical uniform quantizer over the whole box.
      pos[p] = uniform_thresholds(bits, radius * (grids - p) / grids).interior();
    } else {
      for (double& v : pos[p]) v = -radius + 2.0 * radius * unit(rng);
    }
    repair_position(pos[p], radius);
    for (double& v : vel[p]) v = 0.1 * vmax * (2.0 * unit(rng) - 1.0);
  }

  auto eval = [&](const std::vector<double>& x) { return objective(x, bits, z, noise_power); };

  std::vector<std::vector<double>> best_pos = pos;
  std::vector<double> best_val(n);
  for (int p = 0; p < n; ++p) best_val[p] = eval(pos[p]);
  int g = static_cast<int>(std::max_element(best_val.begin(), best_val.end()) - best_val.begin());
  std::vector<double> gbest = best_pos[g];
  double gbest_val = best_val[g];

  PsoResult result;
  result.history.reserve(cfg.max_iters);
  for (int it = 0; it < cfg.max_iters; ++it) {
    for (int p = 0; p < n; ++p) {
      for (int d = 0; d < dim; ++d) {
        const double r1 = unit(rng);
        const double r2 = unit(rng);
        double v = cfg.inertia * vel[p][d] + cfg.cognitive * r1 * (best_pos[p][d] - pos[p][d]) +
                   cfg.social * r2 * (gbest[d] - pos[p][d]);
        vel[p][d] = std::clamp(v, -vmax, vmax);
        pos[p][d] += vel[p][d];
      }
      repair_position(pos[p], radius);
    }
    // Evaluations are independent; the reduction below runs in index order.
    for (int p = 0; p < n; ++p) {
      const double v = eval(pos[p]);
      if (v > best_val[p]) {
        best_val[p] = v;
        best_pos[p] = pos[p];
      }
    }
    for (int p = 0; p < n; ++p)
      if (best_val[p] > gbest_val) {
        gbest_val = best_val[p];
        gbest = best_pos[p];
      }
    result.history.push_back(gbest_val);
    result.iterations = it + 1;
    if (it >= cfg.stall_window) {
      const double before = result.history[it - cfg.stall_window];
      if (gbest_val - before <= cfg.stall_tol * std::abs(gbest_val)) {
        result.converged = true;
        break;
      }
    }
  }
  result.thresholds = ThresholdSet(bits, gbest);
  result.objective = gbest_val;
  return result;
}

struct ThresholdFileMeta {
  std::uint64_t seed = 0;
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
  std::optional<double> snr_db;
};

// Threshold line followed by '#'-prefixed key = value metadata.
inline std::string format_threshold_file(const ThresholdSet& t, const ThresholdFileMeta& meta) {
  std::string out = format_thresholds(t) + "\n";
  out += "# seed = " + std::to_string(meta.seed) + "\n";
  out += "# iterations = " + std::to_string(meta.iterations) + "\n";
  out += "# objective = " + format_double(meta.objective) + "\n";
  out += "# converged = " + std::string(meta.converged ? "true" : "false") + "\n";
  if (meta.snr_db) out += "# snr_db = " + format_double(*meta.snr_db) + "\n";
  return out;
}

// First non-empty, non-comment line of a threshold or optimizer result file.
inline ThresholdSet read_threshold_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open threshold file " + path);
  std::string line;
  while (std::getline(in, line)) {
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    return parse_thresholds(s);
  }
  throw validation_error("no threshold line in " + path);
}

}  // namespace mbq
