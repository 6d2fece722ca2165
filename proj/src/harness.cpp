#include "rcsp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "rcsp/errors.hpp"

namespace rcsp {

namespace {

constexpr const char* kTraceColumns[] = {
    "step",  "x",     "y",       "heading",   "v_cmd",
    "omega_cmd", "v_nom", "omega_nom", "v_exec", "omega_exec",
    "clearance", "cvar_selected", "posterior_entropy", "outcome"};

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

StepOutcome outcome_from_string(const std::string& s) {
  for (StepOutcome o : {StepOutcome::kRunning, StepOutcome::kSuccess,
                        StepOutcome::kCollision, StepOutcome::kTimeout}) {
    if (s == to_string(o)) return o;
  }
  throw ConfigError("unknown outcome '" + s + "'");
}

std::string episode_file_stem(const std::string& env, ControllerKind kind) {
  return env + "__" + to_string(kind);
}

}  // namespace

double episode_score(int success, int collision, int timeout,
                     double safety_cost) {
  return static_cast<double>(success) - static_cast<double>(collision) -
         0.10 * static_cast<double>(timeout) - 0.03 * safety_cost;
}

Json record_config(const EnvironmentConfig& env,
                   const ControllerParams& params) {
  return Json{{"schema_version", kConfigSchemaVersion},
              {"environment", to_json(env)},
              {"controller", to_json(params)}};
}

std::string config_fingerprint(const Json& record_config) {
  return fnv1a_hex(record_config.dump());
}

EpisodeMetrics compute_metrics(const std::vector<TraceRow>& trace,
                               const EnvironmentConfig& env, double c_safe) {
  EpisodeMetrics m;
  m.duration = static_cast<int>(trace.size());
  m.min_clearance = env.params.clearance_sentinel;
  Vec2 prev = env.start.position();
  for (const TraceRow& row : trace) {
    m.min_clearance = std::min(m.min_clearance, row.clearance);
    m.safety_cost +=
        env.params.dt * std::max(0.0, (c_safe - row.clearance) / c_safe);
    m.path_length += distance(prev, row.pose.position());
    prev = row.pose.position();
  }
  if (!trace.empty()) {
    StepOutcome last = trace.back().outcome;
    m.success = last == StepOutcome::kSuccess ? 1 : 0;
    m.collision = last == StepOutcome::kCollision ? 1 : 0;
    m.timeout = last == StepOutcome::kTimeout ? 1 : 0;
  }
  double shortest = distance(env.start.position(), env.goal);
  double denom = std::max(shortest, m.path_length);
  m.spl = (m.success == 1 && denom > 0.0) ? shortest / denom
                                          : static_cast<double>(m.success);
  m.score = episode_score(m.success, m.collision, m.timeout, m.safety_cost);
  return m;
}

EpisodeRecord run_episode(const std::string& env, ControllerKind controller,
                          std::uint64_t seed, const SuiteConfig& config) {
  config.validate();
  auto [cfg, state] = build_environment(env, seed, config.world);
  Controller ctl(controller, cfg, config.controller, seed);

  EpisodeRecord rec;
  rec.environment = env;
  rec.controller = controller;
  rec.seed = seed;
  rec.config = record_config(cfg, config.controller);
  rec.fingerprint = config_fingerprint(rec.config);

  using Clock = std::chrono::steady_clock;
  double latency_total = 0.0;
  Observation obs = observe(state, cfg);
  try {
    while (state.outcome == StepOutcome::kRunning) {
      auto t0 = Clock::now();
      Decision d = ctl.decide(obs);
      auto t1 = Clock::now();
      latency_total +=
          std::chrono::duration<double, std::milli>(t1 - t0).count();

      StepResult r = step_world(state, d.command, cfg);
      TraceRow row;
      row.step = r.state.step;
      row.pose = r.state.robot;
      row.command = d.command;
      row.nominal = d.nominal;
      row.executed = r.executed;
      row.clearance = r.clearance;
      row.cvar_selected = d.tail_risk;
      row.posterior_entropy = d.posterior_entropy;
      row.outcome = r.outcome;
      rec.trace.push_back(row);
      state = std::move(r.state);
      obs = std::move(r.observation);
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.metrics = compute_metrics(rec.trace, cfg, config.controller.planner.c_safe);
  if (!rec.trace.empty()) {
    rec.metrics.mean_planner_latency_ms =
        latency_total / static_cast<double>(rec.trace.size());
  }
  return rec;
}

Json to_json(const EpisodeRecord& record) {
  const EpisodeMetrics& m = record.metrics;
  Json trace = Json::array();
  for (const TraceRow& r : record.trace) {
    Json cvar = r.cvar_selected ? Json(*r.cvar_selected) : Json(nullptr);
    trace.push_back(Json::array(
        {r.step, r.pose.x, r.pose.y, r.pose.heading, r.command.v,
         r.command.omega, r.nominal.v, r.nominal.omega, r.executed.v,
         r.executed.omega, r.clearance, cvar, r.posterior_entropy,
         to_string(r.outcome)}));
  }
  Json j{{"environment", record.environment},
         {"controller", to_string(record.controller)},
         {"seed", record.seed},
         {"fingerprint", record.fingerprint},
         {"config", record.config},
         {"metrics",
          {{"success", m.success},
           {"collision", m.collision},
           {"timeout", m.timeout},
           {"safety_cost", m.safety_cost},
           {"min_clearance", m.min_clearance},
           {"spl", m.spl},
           {"path_length", m.path_length},
           {"duration", m.duration},
           {"score", m.score}}},
         {"trace_columns", kTraceColumns},
         {"trace", trace}};
  if (!record.error.empty()) j["error"] = record.error;
  return j;
}

EpisodeRecord record_from_json(const Json& j) {
  try {
    EpisodeRecord rec;
    rec.environment = j.at("environment").get<std::string>();
    rec.controller =
        controller_kind_from_string(j.at("controller").get<std::string>());
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.fingerprint = j.at("fingerprint").get<std::string>();
    rec.config = j.at("config");
    const Json& m = j.at("metrics");
    rec.metrics.success = m.at("success").get<int>();
    rec.metrics.collision = m.at("collision").get<int>();
    rec.metrics.timeout = m.at("timeout").get<int>();
    rec.metrics.safety_cost = m.at("safety_cost").get<double>();
    rec.metrics.min_clearance = m.at("min_clearance").get<double>();
    rec.metrics.spl = m.at("spl").get<double>();
    rec.metrics.path_length = m.at("path_length").get<double>();
    rec.metrics.duration = m.at("duration").get<int>();
    rec.metrics.score = m.at("score").get<double>();
    for (const Json& r : j.at("trace")) {
      TraceRow row;
      row.step = r.at(0).get<int>();
      row.pose = Pose{r.at(1).get<double>(), r.at(2).get<double>(),
                      r.at(3).get<double>()};
      row.command = {r.at(4).get<double>(), r.at(5).get<double>()};
      row.nominal = {r.at(6).get<double>(), r.at(7).get<double>()};
      row.executed = {r.at(8).get<double>(), r.at(9).get<double>()};
      row.clearance = r.at(10).get<double>();
      if (!r.at(11).is_null()) row.cvar_selected = r.at(11).get<double>();
      row.posterior_entropy = r.at(12).get<double>();
      row.outcome = outcome_from_string(r.at(13).get<std::string>());
      rec.trace.push_back(row);
    }
    if (j.contains("error")) rec.error = j.at("error").get<std::string>();
    return rec;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed episode record: ") + e.what());
  }
}

std::string trace_csv(const EpisodeRecord& record, bool verbose) {
  std::ostringstream out;
  out << "step,x,y,heading,v_cmd,omega_cmd,v_exec,omega_exec,clearance,"
         "cvar_selected,posterior_entropy,outcome";
  if (verbose) out << ",v_nom,omega_nom";
  out << '\n';
  for (const TraceRow& r : record.trace) {
    out << r.step << ',' << fmt(r.pose.x, "%.9g") << ','
        << fmt(r.pose.y, "%.9g") << ',' << fmt(r.pose.heading, "%.9g") << ','
        << fmt(r.command.v, "%.9g") << ',' << fmt(r.command.omega, "%.9g")
        << ',' << fmt(r.executed.v, "%.9g") << ','
        << fmt(r.executed.omega, "%.9g") << ',' << fmt(r.clearance, "%.9g")
        << ',' << (r.cvar_selected ? fmt(*r.cvar_selected, "%.9g") : "")
        << ',' << fmt(r.posterior_entropy, "%.9g") << ','
        << to_string(r.outcome);
    if (verbose) {
      out << ',' << fmt(r.nominal.v, "%.9g") << ','
          << fmt(r.nominal.omega, "%.9g");
    }
    out << '\n';
  }
  return out.str();
}

std::vector<SummaryRow> summarize(const std::vector<EpisodeRecord>& records,
                                  const SuiteConfig& config) {
  auto aggregate = [](const std::string& env, ControllerKind kind,
                      const std::vector<const EpisodeRecord*>& group) {
    SummaryRow row;
    row.environment = env;
    row.controller = to_string(kind);
    int ok = 0;
    for (const EpisodeRecord* r : group) {
      ++row.episodes;
      if (!r->error.empty()) {
        ++row.failed;
        continue;
      }
      ++ok;
      const EpisodeMetrics& m = r->metrics;
      row.success += m.success;
      row.collision += m.collision;
      row.timeout += m.timeout;
      row.safety_cost += m.safety_cost;
      row.min_clearance += m.min_clearance;
      row.spl += m.spl;
      row.path_length += m.path_length;
      row.duration += m.duration;
      row.score += m.score;
      row.latency_ms += m.mean_planner_latency_ms;
    }
    if (ok > 0) {
      double n = ok;
      for (double* f : {&row.success, &row.collision, &row.timeout,
                        &row.safety_cost, &row.min_clearance, &row.spl,
                        &row.path_length, &row.duration, &row.score,
                        &row.latency_ms}) {
        *f /= n;
      }
    }
    return row;
  };

  std::vector<SummaryRow> rows;
  for (const std::string& env : config.environments) {
    for (ControllerKind kind : config.controllers) {
      std::vector<const EpisodeRecord*> group;
      for (const EpisodeRecord& r : records) {
        if (r.environment == env && r.controller == kind) group.push_back(&r);
      }
      rows.push_back(aggregate(env, kind, group));
    }
  }
  if (config.environments.size() > 1) {
    for (ControllerKind kind : config.controllers) {
      std::vector<const EpisodeRecord*> group;
      for (const EpisodeRecord& r : records) {
        if (r.controller == kind) group.push_back(&r);
      }
      rows.push_back(aggregate("pooled", kind, group));
    }
  }
  return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "environment,controller,episodes,failed,success,collision,timeout,"
         "safety_cost,min_clearance,spl,path_length,duration,score\n";
  for (const SummaryRow& r : rows) {
    out << r.environment << ',' << r.controller << ',' << r.episodes << ','
        << r.failed << ',' << fmt(r.success) << ',' << fmt(r.collision) << ','
        << fmt(r.timeout) << ',' << fmt(r.safety_cost) << ','
        << fmt(r.min_clearance) << ',' << fmt(r.spl) << ','
        << fmt(r.path_length) << ',' << fmt(r.duration) << ','
        << fmt(r.score) << '\n';
  }
  return out.str();
}

std::string timing_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "environment,controller,mean_planner_latency_ms\n";
  for (const SummaryRow& r : rows) {
    out << r.environment << ',' << r.controller << ','
        << fmt(r.latency_ms, "%.4f") << '\n';
  }
  return out.str();
}

SuiteResult run_suite(const SuiteConfig& config) {
  config.validate();
  struct Task {
    std::string env;
    ControllerKind kind;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const std::string& env : config.environments) {
    for (ControllerKind kind : config.controllers) {
      for (std::uint64_t seed : config.seeds) tasks.push_back({env, kind, seed});
    }
  }

  SuiteResult result;
  result.records.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      try {
        result.records[i] = run_episode(t.env, t.kind, t.seed, config);
      } catch (const std::exception& e) {
        EpisodeRecord& r = result.records[i];
        r.environment = t.env;
        r.controller = t.kind;
        r.seed = t.seed;
        r.error = e.what();
      }
    }
  };
  std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(config.workers), tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  result.summary = summarize(result.records, config);
  return result;
}

void write_suite_outputs(const SuiteResult& result, const SuiteConfig& config,
                         const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "episodes");
  fs::create_directories(dir / "traces");

  std::map<std::string, std::ostringstream> episode_files;
  for (const EpisodeRecord& r : result.records) {
    std::string stem = episode_file_stem(r.environment, r.controller);
    episode_files[stem] << to_json(r).dump() << '\n';
    std::ofstream trace(dir / "traces" /
                        (stem + "__seed" + std::to_string(r.seed) + ".csv"));
    trace << trace_csv(r, config.verbose);
  }
  for (const auto& [stem, text] : episode_files) {
    std::ofstream out(dir / "episodes" / (stem + ".jsonl"));
    out << text.str();
  }
  std::ofstream(dir / "summary.csv") << summary_csv(result.summary);
  std::ofstream(dir / "timing.csv") << timing_csv(result.summary);
}

ReplayReport replay(const Json& record) {
  if (!record.contains("config") || !record.at("config").is_object()) {
    throw ConfigError("record has no config block");
  }
  const Json& cfg_json = record.at("config");
  std::string schema = cfg_json.value("schema_version", std::string());
  if (schema != kConfigSchemaVersion) {
    throw VersionError("record schema '" + schema + "' does not match '" +
                       kConfigSchemaVersion + "'");
  }
  EpisodeRecord rec = record_from_json(record);
  if (config_fingerprint(cfg_json) != rec.fingerprint) {
    throw VersionError("config fingerprint mismatch");
  }
  EnvironmentConfig env = environment_from_json(cfg_json.at("environment"));
  WorldState state = initial_state(env, rec.seed);

  auto diverge = [](int step, std::string detail) {
    return ReplayReport{false, step, std::move(detail)};
  };
  for (const TraceRow& row : rec.trace) {
    int step = state.step + 1;
    if (row.step != step) return diverge(step, "step index out of sequence");
    if (state.outcome != StepOutcome::kRunning) {
      return diverge(step, "logged step after a terminal state");
    }
    StepResult r = step_world(state, row.command, env);
    if (r.state.robot.x != row.pose.x || r.state.robot.y != row.pose.y ||
        r.state.robot.heading != row.pose.heading) {
      return diverge(step, "pose differs");
    }
    if (r.executed.v != row.executed.v ||
        r.executed.omega != row.executed.omega) {
      return diverge(step, "executed command differs");
    }
    if (r.clearance != row.clearance) return diverge(step, "clearance differs");
    if (r.outcome != row.outcome) return diverge(step, "outcome differs");
    state = std::move(r.state);
  }
  if (rec.error.empty() && state.outcome == StepOutcome::kRunning) {
    return diverge(state.step + 1, "trace ends before a terminal state");
  }
  return {};
}

ReplayFileReport replay_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open record file " + path.string());
  ReplayFileReport report;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++report.records;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ConfigError("record line is not valid JSON: " +
                        std::string(e.what()));
    }
    ReplayReport r = replay(j);
    if (r.match) {
      ++report.matched;
    } else {
      report.failures.push_back(
          j.value("environment", std::string("?")) + "/" +
          j.value("controller", std::string("?")) + " seed " +
          std::to_string(j.value("seed", std::uint64_t{0})) +
          ": divergence at step " + std::to_string(r.first_divergent_step) +
          " (" + r.detail + ")");
    }
  }
  return report;
}

}  // namespace rcsp
