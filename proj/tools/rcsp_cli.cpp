#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rcsp/errors.hpp"
#include "rcsp/harness.hpp"
#include "rcsp/validation.hpp"

namespace {

rcsp::SuiteConfig load_or_default(const std::string& path) {
  if (path.empty()) return rcsp::SuiteConfig{};
  return rcsp::load_suite_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-sensitive conjecture-based navigation benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::string env = "bottleneck";
  std::string controller = "rcsp-full";
  std::uint64_t seed = 0;
  bool verbose = false;
  std::string record_out;
  auto* run = app.add_subcommand("run", "Run a single episode");
  run->add_option("--env", env, "Environment name");
  run->add_option("--controller", controller, "Controller kind");
  run->add_option("--seed", seed, "Episode seed");
  run->add_option("--config", config_path, "JSON config file");
  run->add_flag("--verbose", verbose, "Print the per-step trace");
  run->add_option("--record", record_out, "Write the episode record here");

  std::string out_dir;
  std::optional<int> workers;
  auto* suite = app.add_subcommand("suite", "Run env x controller x seed");
  suite->add_option("--config", config_path, "JSON config file");
  suite->add_option("--out", out_dir, "Output directory");
  suite->add_option("--workers", workers, "Worker threads");

  std::string record_path;
  auto* replay = app.add_subcommand("replay", "Re-simulate logged episodes");
  replay->add_option("--record", record_path, "Episode JSONL file")->required();

  int n = 1000;
  double alpha = 0.1;
  double delta = 0.05;
  double lambda = 1.0;
  int lattice_size = 25;
  int trials = 2000;
  std::string which = "cvar";
  std::string json_out;
  auto* validate = app.add_subcommand("validate", "Check the finite-sample bounds");
  validate->add_option("--n", n, "Samples per command");
  validate->add_option("--alpha", alpha, "CVaR tail fraction");
  validate->add_option("--delta", delta, "Confidence parameter");
  validate->add_option("--lambda", lambda, "Risk weight (regret check only)");
  validate->add_option("--lattice-size", lattice_size, "Number of commands");
  validate->add_option("--trials", trials, "Monte Carlo trials");
  validate->add_option("--seed", seed, "Seed");
  validate->add_option("--check", which, "cvar, regret or both")
      ->check(CLI::IsMember({"cvar", "regret", "both"}));
  validate->add_option("--output", json_out, "Write the report JSON here");

  auto* defaults =
      app.add_subcommand("defaults", "Print the built-in default config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      rcsp::SuiteConfig cfg = load_or_default(config_path);
      rcsp::EpisodeRecord rec = rcsp::run_episode(
          env, rcsp::controller_kind_from_string(controller), seed, cfg);
      if (verbose) std::cout << rcsp::trace_csv(rec, true);
      rcsp::Json metrics = rcsp::to_json(rec)["metrics"];
      metrics["mean_planner_latency_ms"] = rec.metrics.mean_planner_latency_ms;
      std::cout << metrics.dump(2) << '\n';
      if (!record_out.empty()) {
        std::ofstream(record_out) << rcsp::to_json(rec).dump() << '\n';
      }
      if (!rec.error.empty()) {
        std::cerr << "episode aborted: " << rec.error << '\n';
        return 1;
      }
    } else if (*suite) {
      rcsp::SuiteConfig cfg = load_or_default(config_path);
      if (workers) cfg.workers = *workers;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      cfg.validate();
      rcsp::SuiteResult result = rcsp::run_suite(cfg);
      rcsp::write_suite_outputs(result, cfg, cfg.output_dir);
      std::cout << rcsp::summary_csv(result.summary);
    } else if (*replay) {
      rcsp::ReplayFileReport report = rcsp::replay_file(record_path);
      std::cout << report.matched << "/" << report.records
                << " records replayed bit-exactly\n";
      for (const std::string& f : report.failures) std::cout << f << '\n';
      return report.matched == report.records ? 0 : 1;
    } else if (*defaults) {
      std::cout << rcsp::to_json(rcsp::SuiteConfig{}).dump(2) << '\n';
    } else if (*validate) {
      rcsp::Json out = rcsp::Json::object();
      if (which == "cvar" || which == "both") {
        out["cvar_bound"] = rcsp::to_json(
            rcsp::check_prop_c2(n, alpha, delta, lattice_size, trials, seed));
      }
      if (which == "regret" || which == "both") {
        out["regret_bound"] = rcsp::to_json(rcsp::check_prop_c3(
            n, alpha, delta, lambda, lattice_size, trials, seed));
      }
      if (json_out.empty()) {
        std::cout << out.dump(2) << '\n';
      } else {
        std::ofstream(json_out) << out.dump(2) << '\n';
      }
    }
  } catch (const rcsp::VersionError& e) {
    std::cerr << "version error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
