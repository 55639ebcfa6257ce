#pragma once

// Experiment drivers behind the CLI subcommands. Each takes a fully parsed
// ExperimentSpec and writes CSV to `csv`; human-readable progress goes to `log`.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbq/config.hpp"
#include "mbq/csv.hpp"
#include "mbq/montecarlo.hpp"
#include "mbq/pso.hpp"
#include "mbq/selftest.hpp"
#include "mbq/theory.hpp"

namespace mbq {

inline std::vector<double> default_pfa_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 15; ++k) g.push_back(std::pow(10.0, -4.0 + 0.25 * k));
  g.push_back(0.7);
  g.push_back(0.9);
  return g;
}

inline std::vector<double> default_eta_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 30; ++k) g.push_back(k);
  return g;
}

inline PsoConfig pso_for(const ExperimentSpec& spec) {
  PsoConfig p = spec.pso;
  p.seed = spec.require_seed();
  return p;
}

// Thresholds for bit depth q: from the threshold file when it carries this
// depth, otherwise optimized.
inline ThresholdSet thresholds_for(const ExperimentSpec& spec, int q, const EffectiveSignal& z, std::ostream& log) {
  if (!spec.thresholds_path.empty()) {
    const auto t = read_threshold_file(spec.thresholds_path);
    if (spec.q) require(t.bits() == *spec.q, "threshold file has q=" + std::to_string(t.bits()) +
                                                 " but q=" + std::to_string(*spec.q) + " was requested");
    if (t.bits() == q) return t;
  }
  const auto r = optimize_thresholds(q, z, spec.scene.noise_power, pso_for(spec));
  log << "optimized q=" << q << ": " << format_thresholds(r.thresholds) << (r.converged ? "" : " (not converged)")
      << '\n';
  return r.thresholds;
}

inline std::vector<DetectorSpec> detectors_for(const ExperimentSpec& spec, const EffectiveSignal& z, std::ostream& log) {
  std::vector<std::string> names = spec.detectors;
  if (spec.q) {
    const bool with_inf = std::find(names.begin(), names.end(), "inf") != names.end();
    names = {std::to_string(*spec.q)};
    if (with_inf) names.push_back("inf");
  }
  require(!names.empty(), "no detectors selected");
  std::vector<DetectorSpec> out;
  for (const auto& n : names) {
    if (n == "inf")
      out.push_back(DetectorSpec::glrt());
    else
      out.push_back(DetectorSpec::rao(thresholds_for(spec, std::stoi(n), z, log)));
  }
  return out;
}

struct ThresholdsOutcome {
  PsoResult result;
  std::string file_text;
};

// Optimizes one ThresholdSet. The caller reports non-convergence.
inline ThresholdsOutcome cmd_thresholds(const ExperimentSpec& spec, std::ostream& log) {
  require(spec.q.has_value(), "thresholds requires q");
  const auto scene = spec.effective_scene();
  scene.validate();
  const auto z = effective_signal(scene);
  const auto pso = pso_for(spec);
  ThresholdsOutcome out;
  out.result = optimize_thresholds(*spec.q, z, scene.noise_power, pso);
  const auto& r = out.result;
  ThresholdFileMeta meta{pso.seed, r.iterations, r.objective, r.converged, spec.snr_db};
  out.file_text = format_threshold_file(r.thresholds, meta);

  log << "q = " << *spec.q << ", objective = " << format_double(r.objective) << ", iterations = " << r.iterations
      << (r.converged ? ", converged" : ", NOT converged") << '\n';
  const auto& t = r.thresholds;
  for (int i = 1; i <= t.levels(); ++i)
    log << "  bin " << std::setw(3) << i << "  " << codeword(i, t.bits()) << "  (" << t.lower(i) << ", " << t.upper(i)
        << "]\n";
  return out;
}

inline void cmd_roc(const ExperimentSpec& spec, std::ostream& csv, std::ostream& log, bool eta_axis = false) {
  const auto scene = spec.effective_scene();
  scene.validate();
  const auto z = effective_signal(scene);
  TrialConfig tc;
  tc.n_trials_h0 = spec.trials_h0;
  tc.n_trials_h1 = spec.trials_h1;
  tc.seed = spec.require_seed();
  tc.scene = scene;
  tc.workers = spec.workers;
  tc.detectors = detectors_for(spec, z, log);
  const auto samples = run_trials(tc);

  std::vector<RocRow> rows;
  for (std::size_t d = 0; d < tc.detectors.size(); ++d) {
    const double lambda = detector_noncentrality(tc.detectors[d], scene, z);
    const auto roc = eta_axis ? estimate_roc(samples.h0[d], samples.h1[d],
                                             spec.eta_grid.empty() ? default_eta_grid() : spec.eta_grid, lambda)
                              : estimate_roc_pfa(samples.h0[d], samples.h1[d],
                                                 spec.pfa_grid.empty() ? default_pfa_grid() : spec.pfa_grid, lambda);
    const auto r = roc_rows(tc.detectors[d], roc);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  write_roc_csv(csv, rows);
}

inline void cmd_pd_eta(const ExperimentSpec& spec, std::ostream& csv, std::ostream& log) {
  cmd_roc(spec, csv, log, true);
}

inline void cmd_pd_snr(const ExperimentSpec& spec, std::ostream& csv, std::ostream& log) {
  require(!spec.snr_grid.empty(), "pd-snr requires snr_grid");
  spec.scene.validate();
  const auto z = effective_signal(spec.scene);
  const auto dets = detectors_for(spec, z, log);
  const auto sweep = pd_vs_snr(spec.scene, spec.snr_grid, spec.pfa, dets, spec.trials_h1, spec.require_seed(),
                               spec.workers);
  for (const auto& w : sweep.warnings) log << "warning: " << w << '\n';
  write_sweep_csv(csv, sweep.rows);
}

// Theory rows need no randomness unless thresholds must be optimized.
inline void cmd_theory(const ExperimentSpec& spec, std::ostream& csv, std::ostream& log) {
  const auto scene = spec.effective_scene();
  scene.validate();
  const auto z = effective_signal(scene);
  const auto grid = spec.pfa_grid.empty() ? default_pfa_grid() : spec.pfa_grid;
  std::vector<TheoryRow> rows;
  for (const auto& d : detectors_for(spec, z, log)) {
    const auto r = theory_rows(detector_noncentrality(d, scene, z), grid);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  write_theory_csv(csv, rows);
}

// Returns true when every check passed. One JSON object per line.
inline bool cmd_selftest(const SelftestOptions& opt, std::ostream& out) {
  bool ok = true;
  for (const auto& c : run_selftest(opt)) {
    ok = ok && c.passed;
    const nlohmann::json line{{"check", c.name},
                              {"status", c.passed ? "pass" : "fail"},
                              {"value", c.value},
                              {"tolerance", c.tolerance},
                              {"detail", c.detail}};
    out << line.dump() << '\n';
  }
  out << nlohmann::json{{"summary", ok ? "pass" : "fail"}}.dump() << '\n';
  return ok;
}

}  // namespace mbq
