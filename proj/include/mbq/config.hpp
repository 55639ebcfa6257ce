#pragma once

// Flat `key = value` experiment files. '#' starts a comment; list values are
// comma separated. Every key may also be overridden from the command line.
//
//   command        thresholds | roc | pd-eta | pd-snr | theory | selftest
//   seed           master seed (required by every randomized command)
//   n_tx n_rx snapshots wavelength spacing angle noise_power
//   beta_r beta_i  reflection coefficient; snr_db overrides both when set
//   q              bit depth for `thresholds`; restricts other commands to {q, inf}
//   detectors      list drawn from 1..8 and inf (default 1,2,3,inf)
//   thresholds     path to a threshold file (its q replaces PSO for that depth)
//   trials_h0 trials_h1 workers
//   pfa pfa_grid eta_grid snr_grid
//   pso.swarm_size pso.max_iters pso.inertia pso.cognitive pso.social
//   pso.stall_tol pso.stall_window pso.search_radius
//   output         output path ('-' or empty: stdout)

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mbq/errors.hpp"
#include "mbq/pso.hpp"
#include "mbq/quantizer.hpp"
#include "mbq/scene.hpp"

namespace mbq {

struct ExperimentSpec {
  std::string command;
  SceneConfig scene;
  std::optional<double> snr_db;
  std::optional<int> q;
  std::vector<std::string> detectors{"1", "2", "3", "inf"};
  std::string thresholds_path;
  PsoConfig pso;
  long trials_h0 = 100000;
  long trials_h1 = 100000;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  double pfa = 0.01;
  std::vector<double> pfa_grid;
  std::vector<double> eta_grid;
  std::vector<double> snr_grid;
  std::string output;

  // Scene with snr_db applied.
  SceneConfig effective_scene() const { return snr_db ? with_snr_db(scene, *snr_db) : scene; }

  std::uint64_t require_seed() const {
    if (!seed) throw validation_error("missing required key 'seed'");
    return *seed;
  }

  bool operator==(const ExperimentSpec&) const = default;
};

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds{"thresholds", "roc", "pd-eta", "pd-snr", "theory", "selftest"};
  return cmds;
}

inline std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = v.find(',');
    const std::string item = trim(v.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    v = v.substr(comma + 1);
  }
  return out;
}

inline std::vector<double> parse_double_list(std::string_view v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_double(s));
  return out;
}

inline long parse_integer(std::string_view text, const std::string& key) {
  const double v = parse_double(text);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) throw validation_error("key '" + key + "' expects an integer");
  return static_cast<long>(v);
}

inline std::uint64_t parse_seed(std::string_view text) {
  const std::string s = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw validation_error("seed must be an unsigned 64-bit integer");
  return v;
}

// Applies one key; unknown keys are rejected.
inline void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  auto as_int = [&] { return static_cast<int>(parse_integer(value, key)); };
  auto as_long = [&] { return parse_integer(value, key); };
  auto as_double = [&] { return parse_double(value); };

  if (key == "command") {
    const std::string v = trim(value);
    bool ok = false;
    for (const auto& c : known_commands()) ok = ok || c == v;
    require(ok, "unknown command '" + v + "'");
    spec.command = v;
  } else if (key == "seed") {
    spec.seed = parse_seed(value);
  } else if (key == "n_tx") {
    spec.scene.n_tx = as_int();
  } else if (key == "n_rx") {
    spec.scene.n_rx = as_int();
  } else if (key == "snapshots") {
    spec.scene.snapshots = as_int();
  } else if (key == "wavelength") {
    spec.scene.wavelength = as_double();
  } else if (key == "spacing") {
    spec.scene.spacing = as_double();
  } else if (key == "angle") {
    spec.scene.angle = as_double();
  } else if (key == "noise_power") {
    spec.scene.noise_power = as_double();
  } else if (key == "beta_r") {
    spec.scene.beta_r = as_double();
  } else if (key == "beta_i") {
    spec.scene.beta_i = as_double();
  } else if (key == "snr_db") {
    spec.snr_db = as_double();
  } else if (key == "q") {
    spec.q = as_int();
    require(*spec.q >= 1 && *spec.q <= 8, "q must lie in 1..8");
  } else if (key == "detectors") {
    spec.detectors = split_list(value);
    for (const auto& d : spec.detectors)
      require(d == "inf" || (d.size() == 1 && d[0] >= '1' && d[0] <= '8'), "bad detector '" + d + "'");
  } else if (key == "thresholds") {
    spec.thresholds_path = trim(value);
  } else if (key == "trials_h0") {
    spec.trials_h0 = as_long();
  } else if (key == "trials_h1") {
    spec.trials_h1 = as_long();
  } else if (key == "trials") {
    spec.trials_h0 = spec.trials_h1 = as_long();
  } else if (key == "workers") {
    spec.workers = as_int();
  } else if (key == "pfa") {
    spec.pfa = as_double();
  } else if (key == "pfa_grid") {
    spec.pfa_grid = parse_double_list(value);
  } else if (key == "eta_grid") {
    spec.eta_grid = parse_double_list(value);
  } else if (key == "snr_grid") {
    spec.snr_grid = parse_double_list(value);
  } else if (key == "output") {
    spec.output = trim(value);
  } else if (key == "pso.swarm_size") {
    spec.pso.swarm_size = as_int();
  } else if (key == "pso.max_iters") {
    spec.pso.max_iters = as_int();
  } else if (key == "pso.inertia") {
    spec.pso.inertia = as_double();
  } else if (key == "pso.cognitive") {
    spec.pso.cognitive = as_double();
  } else if (key == "pso.social") {
    spec.pso.social = as_double();
  } else if (key == "pso.stall_tol") {
    spec.pso.stall_tol = as_double();
  } else if (key == "pso.stall_window") {
    spec.pso.stall_window = as_int();
  } else if (key == "pso.search_radius") {
    spec.pso.search_radius = as_double();
  } else {
    throw validation_error("unknown key '" + key + "'");
  }
}

// Parses "key=value" (used for --set overrides).
inline void apply_assignment(ExperimentSpec& spec, std::string_view line) {
  const auto eq = line.find('=');
  require(eq != std::string_view::npos, "expected key = value, got '" + std::string(line) + "'");
  apply_setting(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
}

inline ExperimentSpec parse_spec(std::string_view text, ExperimentSpec spec = {}) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    try {
      apply_assignment(spec, body);
    } catch (const validation_error& e) {
      throw validation_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return spec;
}

inline ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

inline std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + format_double(v[k]);
  return out;
}

// Canonical text form; parse_spec(serialize_spec(s)) == s.
inline std::string serialize_spec(const ExperimentSpec& s) {
  std::ostringstream o;
  auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
  if (!s.command.empty()) kv("command", s.command);
  if (s.seed) kv("seed", std::to_string(*s.seed));
  kv("n_tx", std::to_string(s.scene.n_tx));
  kv("n_rx", std::to_string(s.scene.n_rx));
  kv("snapshots", std::to_string(s.scene.snapshots));
  kv("wavelength", format_double(s.scene.wavelength));
  kv("spacing", format_double(s.scene.spacing));
  kv("angle", format_double(s.scene.angle));
  kv("noise_power", format_double(s.scene.noise_power));
  kv("beta_r", format_double(s.scene.beta_r));
  kv("beta_i", format_double(s.scene.beta_i));
  if (s.snr_db) kv("snr_db", format_double(*s.snr_db));
  if (s.q) kv("q", std::to_string(*s.q));
  std::string dets;
  for (std::size_t k = 0; k < s.detectors.size(); ++k) dets += (k ? "," : "") + s.detectors[k];
  kv("detectors", dets);
  if (!s.thresholds_path.empty()) kv("thresholds", s.thresholds_path);
  kv("trials_h0", std::to_string(s.trials_h0));
  kv("trials_h1", std::to_string(s.trials_h1));
  kv("workers", std::to_string(s.workers));
  kv("pfa", format_double(s.pfa));
  kv("pfa_grid", join_doubles(s.pfa_grid));
  kv("eta_grid", join_doubles(s.eta_grid));
  kv("snr_grid", join_doubles(s.snr_grid));
  if (!s.output.empty()) kv("output", s.output);
  kv("pso.swarm_size", std::to_string(s.pso.swarm_size));
  kv("pso.max_iters", std::to_string(s.pso.max_iters));
  kv("pso.inertia", format_double(s.pso.inertia));
  kv("pso.cognitive", format_double(s.pso.cognitive));
  kv("pso.social", format_double(s.pso.social));
  kv("pso.stall_tol", format_double(s.pso.stall_tol));
  kv("pso.stall_window", std::to_string(s.pso.stall_window));
  if (s.pso.search_radius) kv("pso.search_radius", format_double(*s.pso.search_radius));
  return o.str();
}

}  // namespace mbq
