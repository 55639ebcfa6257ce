// mbqdetect: quantizer design, Monte Carlo detection experiments and
// asymptotic theory curves for multi-bit quantized MIMO radar detection.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbq/commands.hpp"
#include "mbq/config.hpp"

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kNumerical = 2, kSelftest = 3 };

class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw mbq::validation_error("cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

int run(const mbq::ExperimentSpec& spec, const mbq::SelftestOptions& selftest) {
  if (spec.command.empty()) throw mbq::validation_error("no command given");
  auto& log = std::cerr;

  if (spec.command == "thresholds") {
    const auto out = mbq::cmd_thresholds(spec, log);
    std::cout << out.file_text;
    if (!spec.output.empty() && spec.output != "-") {
      OutputTarget target(spec.output);
      target.stream() << out.file_text;
    }
    if (!out.result.converged) {
      log << "error: optimizer did not meet the stall criterion within " << out.result.iterations << " iterations\n";
      return kNumerical;
    }
    return kOk;
  }
  if (spec.command == "selftest") return mbq::cmd_selftest(selftest, std::cout) ? kOk : kSelftest;

  OutputTarget target(spec.output);
  if (spec.command == "roc")
    mbq::cmd_roc(spec, target.stream(), log);
  else if (spec.command == "pd-eta")
    mbq::cmd_pd_eta(spec, target.stream(), log);
  else if (spec.command == "pd-snr")
    mbq::cmd_pd_snr(spec, target.stream(), log);
  else if (spec.command == "theory")
    mbq::cmd_theory(spec, target.stream(), log);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-bit quantized detection for colocated MIMO radar"};
  app.set_help_flag("-h,--help", "Show help");

  std::string command;
  std::string config_path;
  std::optional<int> q;
  std::optional<double> snr;
  std::optional<double> pfa;
  std::optional<long> trials;
  std::optional<std::string> seed;
  std::optional<std::string> out;
  std::optional<std::string> thresholds;
  std::vector<std::string> sets;
  bool print_config = false;

  app.add_option("command", command, "thresholds | roc | pd-eta | pd-snr | theory | selftest");
  app.add_option("--config", config_path, "Experiment file (key = value lines)");
  app.add_option("--q", q, "Bit depth");
  app.add_option("--snr-db", snr, "Target SNR in dB");
  app.add_option("--pfa", pfa, "False-alarm probability");
  app.add_option("--trials", trials, "Trials per hypothesis");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out, "Output path");
  app.add_option("--thresholds", thresholds, "Threshold file");
  app.add_option("--set", sets, "Override any config key: key=value (repeatable)");
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    mbq::ExperimentSpec spec = config_path.empty() ? mbq::ExperimentSpec{} : mbq::load_spec(config_path);
    if (!command.empty()) mbq::apply_setting(spec, "command", command);
    if (q) mbq::apply_setting(spec, "q", std::to_string(*q));
    if (snr) spec.snr_db = *snr;
    if (pfa) spec.pfa = *pfa;
    if (trials) mbq::apply_setting(spec, "trials", std::to_string(*trials));
    if (seed) mbq::apply_setting(spec, "seed", *seed);
    if (out) spec.output = *out;
    if (thresholds) spec.thresholds_path = *thresholds;
    for (const auto& s : sets) mbq::apply_assignment(spec, s);

    if (print_config) {
      std::cout << mbq::serialize_spec(spec);
      return kOk;
    }

    mbq::SelftestOptions selftest;
    if (spec.seed) selftest.seed = *spec.seed;
    return run(spec, selftest);
  } catch (const mbq::validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const mbq::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  }
}
