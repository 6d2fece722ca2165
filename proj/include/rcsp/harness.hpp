#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rcsp/config.hpp"

namespace rcsp {

struct EpisodeMetrics {
  int success = 0;
  int collision = 0;
  int timeout = 0;
  double safety_cost = 0.0;
  double min_clearance = 0.0;
  double spl = 0.0;
  double path_length = 0.0;
  int duration = 0;  // steps
  double mean_planner_latency_ms = 0.0;
  double score = 0.0;
};

/// success - collision - 0.10 timeout - 0.03 safety_cost
double episode_score(int success, int collision, int timeout,
                     double safety_cost);

/// One control period. `step` counts from 1; pose and clearance are the
/// state after the step was simulated.
struct TraceRow {
  int step = 0;
  Pose pose;
  VelocityCommand command;
  VelocityCommand nominal;
  VelocityCommand executed;
  double clearance = 0.0;
  std::optional<double> cvar_selected;
  double posterior_entropy = 0.0;
  StepOutcome outcome = StepOutcome::kRunning;
};

struct EpisodeRecord {
  std::string environment;
  ControllerKind controller = ControllerKind::kRcspFull;
  std::uint64_t seed = 0;
  Json config;  // schema version, environment, controller params
  std::string fingerprint;
  std::vector<TraceRow> trace;
  EpisodeMetrics metrics;
  std::string error;  // nonempty when the episode aborted
};

/// Config block stored in a record and the fingerprint computed from it.
Json record_config(const EnvironmentConfig& env, const ControllerParams& params);
std::string config_fingerprint(const Json& record_config);

/// Throws ConfigError for an invalid config or unknown names before any
/// stepping takes place.
EpisodeRecord run_episode(const std::string& env, ControllerKind controller,
                          std::uint64_t seed, const SuiteConfig& config);

/// Metrics for a finished trace. Latency is left at zero.
EpisodeMetrics compute_metrics(const std::vector<TraceRow>& trace,
                               const EnvironmentConfig& env, double c_safe);

/// Wall-clock latency is not serialized so records stay reproducible.
Json to_json(const EpisodeRecord& record);
EpisodeRecord record_from_json(const Json& j);

std::string trace_csv(const EpisodeRecord& record, bool verbose = false);

struct SummaryRow {
  std::string environment;  // "pooled" for the cross-environment row
  std::string controller;
  int episodes = 0;
  int failed = 0;  // episodes that aborted with an error
  double success = 0.0;
  double collision = 0.0;
  double timeout = 0.0;
  double safety_cost = 0.0;
  double min_clearance = 0.0;
  double spl = 0.0;
  double path_length = 0.0;
  double duration = 0.0;
  double score = 0.0;
  double latency_ms = 0.0;
};

/// Per-(env, controller) means in config order, then one pooled row per
/// controller when the suite covers more than one environment.
std::vector<SummaryRow> summarize(const std::vector<EpisodeRecord>& records,
                                  const SuiteConfig& config);

std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string timing_csv(const std::vector<SummaryRow>& rows);

struct SuiteResult {
  std::vector<EpisodeRecord> records;  // sorted by (env, controller, seed)
  std::vector<SummaryRow> summary;
};

/// Runs env x controller x seed on `config.workers` threads.
SuiteResult run_suite(const SuiteConfig& config);

/// Writes episodes/<env>__<controller>.jsonl, traces/*.csv, summary.csv
/// and timing.csv under `dir`.
void write_suite_outputs(const SuiteResult& result, const SuiteConfig& config,
                         const std::filesystem::path& dir);

struct ReplayReport {
  bool match = true;
  int first_divergent_step = 0;  // 0 when matched
  std::string detail;
};

/// Re-simulates one record from its logged commands. Throws VersionError if
/// the schema or fingerprint does not match.
ReplayReport replay(const Json& record);

struct ReplayFileReport {
  std::size_t records = 0;
  std::size_t matched = 0;
  std::vector<std::string> failures;
};

/// Replays every line of a JSONL file.
ReplayFileReport replay_file(const std::filesystem::path& path);

}  // namespace rcsp
