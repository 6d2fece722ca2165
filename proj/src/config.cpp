#include "rcsp/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "rcsp/errors.hpp"

namespace rcsp {

namespace {

Json vec_json(Vec2 v) { return Json::array({v.x, v.y}); }

Vec2 vec_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError("expected a 2-element array for a point");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
T value_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

const Json& block(const Json& j, const char* key) {
  static const Json kEmpty = Json::object();
  if (!j.is_object() || !j.contains(key)) return kEmpty;
  return j.at(key);
}

}  // namespace

Json to_json(const WorldParams& p) {
  return Json{{"dt", p.dt},
              {"max_steps", p.max_steps},
              {"v_max", p.v_max},
              {"omega_max", p.omega_max},
              {"robot_radius", p.robot_radius},
              {"goal_radius", p.goal_radius},
              {"obs_sigma", p.obs_sigma},
              {"sensing_radius", p.sensing_radius},
              {"act_sigma", p.act_sigma},
              {"command_delay", p.command_delay},
              {"substeps", p.substeps},
              {"clearance_sentinel", p.clearance_sentinel}};
}

WorldParams world_params_from_json(const Json& j) {
  WorldParams d;
  WorldParams p;
  p.dt = value_or(j, "dt", d.dt);
  p.max_steps = value_or(j, "max_steps", d.max_steps);
  p.v_max = value_or(j, "v_max", d.v_max);
  p.omega_max = value_or(j, "omega_max", d.omega_max);
  p.robot_radius = value_or(j, "robot_radius", d.robot_radius);
  p.goal_radius = value_or(j, "goal_radius", d.goal_radius);
  p.obs_sigma = value_or(j, "obs_sigma", d.obs_sigma);
  p.sensing_radius = value_or(j, "sensing_radius", d.sensing_radius);
  p.act_sigma = value_or(j, "act_sigma", d.act_sigma);
  p.command_delay = value_or(j, "command_delay", d.command_delay);
  p.substeps = value_or(j, "substeps", d.substeps);
  p.clearance_sentinel =
      value_or(j, "clearance_sentinel", d.clearance_sentinel);
  return p;
}

Json to_json(const EnvironmentConfig& cfg) {
  Json walls = Json::array();
  for (const WallSegment& w : cfg.map.walls) {
    walls.push_back(Json::array({vec_json(w.a), vec_json(w.b)}));
  }
  Json obstacles = Json::array();
  for (const ObstacleSpec& o : cfg.obstacles) {
    obstacles.push_back(Json{{"id", o.id},
                             {"position", vec_json(o.position)},
                             {"radius", o.radius},
                             {"behavior", to_string(o.behavior)},
                             {"speed", o.speed},
                             {"trigger_distance", o.trigger_distance},
                             {"sigma", o.sigma},
                             {"direction", vec_json(o.direction)},
                             {"waypoint", vec_json(o.waypoint)},
                             {"phase", o.phase},
                             {"rush_factor", o.rush_factor},
                             {"dwell_steps", o.dwell_steps}});
  }
  const Bounds& b = cfg.map.bounds;
  return Json{
      {"name", cfg.name},
      {"bounds", Json::array({b.x_min, b.x_max, b.y_min, b.y_max})},
      {"walls", walls},
      {"obstacles", obstacles},
      {"start", Json::array({cfg.start.x, cfg.start.y, cfg.start.heading})},
      {"goal", vec_json(cfg.goal)},
      {"params", to_json(cfg.params)}};
}

EnvironmentConfig environment_from_json(const Json& j) {
  try {
    EnvironmentConfig cfg;
    cfg.name = j.at("name").get<std::string>();
    const Json& b = j.at("bounds");
    cfg.map.bounds = Bounds{b.at(0).get<double>(), b.at(1).get<double>(),
                            b.at(2).get<double>(), b.at(3).get<double>()};
    for (const Json& w : j.at("walls")) {
      cfg.map.walls.push_back({vec_from(w.at(0)), vec_from(w.at(1))});
    }
    for (const Json& o : j.at("obstacles")) {
      ObstacleSpec s;
      s.id = o.at("id").get<int>();
      s.position = vec_from(o.at("position"));
      s.radius = o.at("radius").get<double>();
      s.behavior = behavior_from_string(o.at("behavior").get<std::string>());
      s.speed = o.at("speed").get<double>();
      s.trigger_distance = o.at("trigger_distance").get<double>();
      s.sigma = o.at("sigma").get<double>();
      s.direction = vec_from(o.at("direction"));
      s.waypoint = vec_from(o.at("waypoint"));
      s.phase = o.at("phase").get<double>();
      s.rush_factor = o.at("rush_factor").get<double>();
      s.dwell_steps = o.at("dwell_steps").get<int>();
      cfg.obstacles.push_back(s);
    }
    const Json& st = j.at("start");
    cfg.start = Pose{st.at(0).get<double>(), st.at(1).get<double>(),
                     st.at(2).get<double>()};
    cfg.goal = vec_from(j.at("goal"));
    cfg.params = world_params_from_json(j.at("params"));
    validate(cfg);
    return cfg;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed environment config: ") +
                      e.what());
  }
}

Json to_json(const Conjecture& c) {
  return Json{{"kind", to_string(c.kind)},
              {"speed_scale", c.speed_scale},
              {"yield_distance", c.yield_distance},
              {"decel", c.decel},
              {"pursuit_gain", c.pursuit_gain},
              {"sigma", c.sigma}};
}

Conjecture conjecture_from_json(const Json& j) {
  Conjecture c;
  c.kind = conjecture_kind_from_string(j.at("kind").get<std::string>());
  c.speed_scale = value_or(j, "speed_scale", c.speed_scale);
  c.yield_distance = value_or(j, "yield_distance", c.yield_distance);
  c.decel = value_or(j, "decel", c.decel);
  c.pursuit_gain = value_or(j, "pursuit_gain", c.pursuit_gain);
  c.sigma = value_or(j, "sigma", c.sigma);
  if (c.speed_scale < 0.0 || c.yield_distance < 0.0 || c.decel < 0.0 ||
      c.pursuit_gain < 0.0 || c.sigma < 0.0) {
    throw ConfigError("conjecture parameters must be nonnegative");
  }
  return c;
}

Json to_json(const ControllerParams& p) {
  Json family = Json::array();
  for (const Conjecture& c : p.belief.family) family.push_back(to_json(c));
  return Json{
      {"belief",
       {{"conjectures", family},
        {"tau", p.belief.tau},
        {"floor", p.belief.floor},
        {"smoothing", p.belief.smoothing},
        {"initial_variance", p.belief.initial_variance},
        {"stale_inflation", p.belief.stale_inflation},
        {"likelihood_slack", p.belief.likelihood_slack}}},
      {"planner",
       {{"scenarios", p.planner.scenarios},
        {"horizon", p.planner.horizon},
        {"alpha", p.planner.alpha},
        {"lambda", p.planner.lambda},
        {"objective", to_string(p.planner.objective)},
        {"top_k", p.planner.top_k},
        {"c_safe", p.planner.c_safe},
        {"tail_rule", to_string(p.planner.tail_rule)}}},
      {"filter",
       {{"c_hard", p.filter.c_hard},
        {"kappa", p.filter.kappa},
        {"horizon", p.filter.horizon},
        {"w_progress", p.filter.w_progress},
        {"w_clearance", p.filter.w_clearance},
        {"w_deviation", p.filter.w_deviation},
        {"penalty", p.filter.penalty},
        {"clearance_cap", p.filter.clearance_cap}}},
      {"lattice",
       {{"v_levels", p.lattice.v_levels},
        {"omega_levels", p.lattice.omega_levels}}},
      {"dwa",
       {{"w_heading", p.dwa.w_heading},
        {"w_clearance", p.dwa.w_clearance},
        {"w_velocity", p.dwa.w_velocity},
        {"clearance_cap", p.dwa.clearance_cap}}},
      {"goal_pd",
       {{"k_heading", p.goal_pd.k_heading},
        {"k_speed", p.goal_pd.k_speed}}}};
}

ControllerParams controller_params_from_json(const Json& j) {
  ControllerParams p;
  const Json& b = block(j, "belief");
  if (b.contains("conjectures")) {
    p.belief.family.clear();
    for (const Json& c : b.at("conjectures")) {
      p.belief.family.push_back(conjecture_from_json(c));
    }
  }
  p.belief.tau = value_or(b, "tau", p.belief.tau);
  p.belief.floor = value_or(b, "floor", p.belief.floor);
  p.belief.smoothing = value_or(b, "smoothing", p.belief.smoothing);
  p.belief.initial_variance =
      value_or(b, "initial_variance", p.belief.initial_variance);
  p.belief.stale_inflation =
      value_or(b, "stale_inflation", p.belief.stale_inflation);
  p.belief.likelihood_slack =
      value_or(b, "likelihood_slack", p.belief.likelihood_slack);

  const Json& pl = block(j, "planner");
  p.planner.scenarios = value_or(pl, "scenarios", p.planner.scenarios);
  p.planner.horizon = value_or(pl, "horizon", p.planner.horizon);
  p.planner.alpha = value_or(pl, "alpha", p.planner.alpha);
  p.planner.lambda = value_or(pl, "lambda", p.planner.lambda);
  p.planner.objective = objective_from_string(
      value_or<std::string>(pl, "objective", to_string(p.planner.objective)));
  p.planner.top_k = value_or(pl, "top_k", p.planner.top_k);
  p.planner.c_safe = value_or(pl, "c_safe", p.planner.c_safe);
  p.planner.tail_rule = tail_rule_from_string(value_or<std::string>(
      pl, "tail_rule", to_string(p.planner.tail_rule)));

  const Json& f = block(j, "filter");
  p.filter.c_hard = value_or(f, "c_hard", p.filter.c_hard);
  p.filter.kappa = value_or(f, "kappa", p.filter.kappa);
  p.filter.horizon = value_or(f, "horizon", p.filter.horizon);
  p.filter.w_progress = value_or(f, "w_progress", p.filter.w_progress);
  p.filter.w_clearance = value_or(f, "w_clearance", p.filter.w_clearance);
  p.filter.w_deviation = value_or(f, "w_deviation", p.filter.w_deviation);
  p.filter.penalty = value_or(f, "penalty", p.filter.penalty);
  p.filter.clearance_cap = value_or(f, "clearance_cap", p.filter.clearance_cap);

  const Json& l = block(j, "lattice");
  p.lattice.v_levels = value_or(l, "v_levels", p.lattice.v_levels);
  p.lattice.omega_levels = value_or(l, "omega_levels", p.lattice.omega_levels);

  const Json& d = block(j, "dwa");
  p.dwa.w_heading = value_or(d, "w_heading", p.dwa.w_heading);
  p.dwa.w_clearance = value_or(d, "w_clearance", p.dwa.w_clearance);
  p.dwa.w_velocity = value_or(d, "w_velocity", p.dwa.w_velocity);
  p.dwa.clearance_cap = value_or(d, "clearance_cap", p.dwa.clearance_cap);

  const Json& g = block(j, "goal_pd");
  p.goal_pd.k_heading = value_or(g, "k_heading", p.goal_pd.k_heading);
  p.goal_pd.k_speed = value_or(g, "k_speed", p.goal_pd.k_speed);
  return p;
}

void SuiteConfig::validate() const {
  if (environments.empty() || controllers.empty() || seeds.empty()) {
    throw ConfigError("suite needs environments, controllers and seeds");
  }
  const auto& known = environment_names();
  for (const std::string& e : environments) {
    if (std::find(known.begin(), known.end(), e) == known.end()) {
      throw ConfigError("unknown environment '" + e + "'");
    }
  }
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw ConfigError("seeds must be distinct");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  controller.planner.validate();
  controller.filter.validate();
  if (controller.belief.family.empty()) {
    throw ConfigError("conjecture family is empty");
  }
  if (controller.planner.top_k > static_cast<int>(controller.belief.family.size())) {
    throw ConfigError("top_k exceeds the conjecture family size");
  }
}

Json to_json(const SuiteConfig& cfg) {
  Json controllers = Json::array();
  for (ControllerKind k : cfg.controllers) controllers.push_back(to_string(k));
  Json j = to_json(cfg.controller);
  j["schema_version"] = kConfigSchemaVersion;
  j["world"] = to_json(cfg.world);
  j["suite"] = Json{{"environments", cfg.environments},
                    {"controllers", controllers},
                    {"seeds", cfg.seeds},
                    {"output_dir", cfg.output_dir},
                    {"workers", cfg.workers},
                    {"verbose", cfg.verbose}};
  return j;
}

SuiteConfig suite_config_from_json(const Json& j) {
  try {
    SuiteConfig cfg;
    if (j.contains("schema_version") &&
        j.at("schema_version").get<std::string>() != kConfigSchemaVersion) {
      throw VersionError("config schema '" +
                         j.at("schema_version").get<std::string>() +
                         "' is not supported");
    }
    cfg.world = world_params_from_json(block(j, "world"));
    cfg.controller = controller_params_from_json(j);
    const Json& s = block(j, "suite");
    cfg.environments = value_or(s, "environments", cfg.environments);
    if (s.contains("controllers")) {
      cfg.controllers.clear();
      for (const Json& c : s.at("controllers")) {
        cfg.controllers.push_back(
            controller_kind_from_string(c.get<std::string>()));
      }
    }
    cfg.seeds = value_or(s, "seeds", cfg.seeds);
    cfg.output_dir = value_or(s, "output_dir", cfg.output_dir);
    cfg.workers = value_or(s, "workers", cfg.workers);
    cfg.verbose = value_or(s, "verbose", cfg.verbose);
    cfg.validate();
    return cfg;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

SuiteConfig load_suite_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " +
                      e.what());
  }
  return suite_config_from_json(j);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rcsp
