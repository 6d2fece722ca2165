#include "rcsp/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rcsp/errors.hpp"
#include "rcsp/random.hpp"

namespace rcsp {

const char* to_string(ObstacleBehavior behavior) {
  switch (behavior) {
    case ObstacleBehavior::kCrossing:
      return "crossing";
    case ObstacleBehavior::kPatrolling:
      return "patrolling";
    case ObstacleBehavior::kGapBlocking:
      return "gap-blocking";
  }
  return "unknown";
}

ObstacleBehavior behavior_from_string(const std::string& name) {
  if (name == "crossing") return ObstacleBehavior::kCrossing;
  if (name == "patrolling") return ObstacleBehavior::kPatrolling;
  if (name == "gap-blocking") return ObstacleBehavior::kGapBlocking;
  throw ConfigError("unknown obstacle behavior '" + name + "'");
}

const char* to_string(StepOutcome outcome) {
  switch (outcome) {
    case StepOutcome::kRunning:
      return "running";
    case StepOutcome::kSuccess:
      return "success";
    case StepOutcome::kCollision:
      return "collision";
    case StepOutcome::kTimeout:
      return "timeout";
  }
  return "unknown";
}

void validate(const EnvironmentConfig& config) {
  const WorldParams& p = config.params;
  if (!(p.dt > 0.0)) throw ConfigError("dt must be positive");
  if (p.max_steps <= 0) throw ConfigError("max_steps must be positive");
  if (p.substeps <= 0) throw ConfigError("substeps must be positive");
  if (p.command_delay < 0) throw ConfigError("command_delay must be >= 0");
  if (!(p.v_max > 0.0) || !(p.omega_max > 0.0)) {
    throw ConfigError("velocity limits must be positive");
  }
  if (!(p.robot_radius > 0.0)) throw ConfigError("robot radius must be > 0");
  if (p.obs_sigma < 0.0 || p.act_sigma < 0.0) {
    throw ConfigError("noise levels must be >= 0");
  }
  const Bounds& b = config.map.bounds;
  if (!(b.x_max > b.x_min) || !(b.y_max > b.y_min)) {
    throw ConfigError("map bounds are empty");
  }
  if (!b.contains(config.goal)) throw ConfigError("goal outside map bounds");
  for (const WallSegment& w : config.map.walls) {
    if (!b.contains(w.a) || !b.contains(w.b)) {
      throw ConfigError("wall outside map bounds");
    }
    if (w.a == w.b) throw ConfigError("wall endpoints coincide");
  }
  for (const ObstacleSpec& o : config.obstacles) {
    if (!(o.radius > 0.0)) throw ConfigError("obstacle radius must be > 0");
    if (o.speed < 0.0 || o.sigma < 0.0) {
      throw ConfigError("obstacle speed and sigma must be >= 0");
    }
  }
  std::vector<Disc> discs;
  for (const ObstacleSpec& o : config.obstacles) {
    discs.push_back({o.position, o.radius});
  }
  const double c = clearance({config.start.position(), p.robot_radius}, discs,
                             config.map.walls, p.clearance_sentinel);
  if (c < 0.0) throw ConfigError("start pose is in collision");
}

namespace {

void add_box(std::vector<WallSegment>& walls, double x0, double y0, double x1,
             double y1) {
  walls.push_back({{x0, y0}, {x1, y0}});
  walls.push_back({{x1, y0}, {x1, y1}});
  walls.push_back({{x1, y1}, {x0, y1}});
  walls.push_back({{x0, y1}, {x0, y0}});
}

double patrol_length(const ObstacleSpec& spec) {
  return distance(spec.position, spec.waypoint);
}

Vec2 patrol_position(const ObstacleSpec& spec, double progress) {
  const double len = patrol_length(spec);
  if (len <= 0.0) return spec.position;
  const double s = progress <= len ? progress : 2.0 * len - progress;
  return spec.position + (s / len) * (spec.waypoint - spec.position);
}

// Moves `from` toward `to` by at most `step`; returns true on arrival.
bool move_toward(Vec2& from, Vec2 to, double step) {
  const Vec2 d = to - from;
  const double len = d.norm();
  if (len <= step) {
    from = to;
    return true;
  }
  from += (step / len) * d;
  return false;
}

Vec2 clamp_to(const Bounds& b, Vec2 p) {
  return {std::clamp(p.x, b.x_min, b.x_max), std::clamp(p.y, b.y_min, b.y_max)};
}

// Advances the scripted (noise-free) part of one obstacle.
void advance_nominal(const ObstacleSpec& spec, ObstacleState& s,
                     const Pose& robot, const Bounds& bounds, double dt) {
  switch (spec.behavior) {
    case ObstacleBehavior::kCrossing: {
      Vec2 next = s.nominal + (spec.speed * dt) * s.direction;
      if (next.x < bounds.x_min || next.x > bounds.x_max) {
        s.direction.x = -s.direction.x;
        next.x = next.x < bounds.x_min ? 2.0 * bounds.x_min - next.x
                                       : 2.0 * bounds.x_max - next.x;
      }
      if (next.y < bounds.y_min || next.y > bounds.y_max) {
        s.direction.y = -s.direction.y;
        next.y = next.y < bounds.y_min ? 2.0 * bounds.y_min - next.y
                                       : 2.0 * bounds.y_max - next.y;
      }
      s.nominal = clamp_to(bounds, next);
      break;
    }
    case ObstacleBehavior::kPatrolling: {
      const double cycle = 2.0 * patrol_length(spec);
      if (cycle > 0.0) {
        s.progress = std::fmod(s.progress + spec.speed * dt, cycle);
      }
      s.nominal = patrol_position(spec, s.progress);
      break;
    }
    case ObstacleBehavior::kGapBlocking: {
      if (s.mode == BlockerMode::kIdle &&
          distance(robot.position(), spec.waypoint) <= spec.trigger_distance) {
        s.mode = BlockerMode::kClosing;
      }
      switch (s.mode) {
        case BlockerMode::kClosing:
          if (move_toward(s.nominal, spec.waypoint,
                          spec.speed * spec.rush_factor * dt)) {
            s.mode = BlockerMode::kDwell;
            s.dwell_left = spec.dwell_steps;
          }
          break;
        case BlockerMode::kDwell:
          if (--s.dwell_left <= 0) s.mode = BlockerMode::kReturning;
          break;
        case BlockerMode::kReturning:
          if (move_toward(s.nominal, spec.position, spec.speed * dt)) {
            s.mode = BlockerMode::kDone;
          }
          break;
        case BlockerMode::kIdle:
        case BlockerMode::kDone:
          break;
      }
      break;
    }
  }
}

}  // namespace

const std::vector<std::string>& environment_names() {
  static const std::vector<std::string> names = {"bottleneck",
                                                 "warehouse-squeeze",
                                                 "open-space"};
  return names;
}

std::pair<EnvironmentConfig, WorldState> build_environment(
    const std::string& name, std::uint64_t seed, const WorldParams& params) {
  Rng rng(seed, Stream::kEnvironment);
  EnvironmentConfig cfg;
  cfg.name = name;
  cfg.params = params;
  cfg.map.bounds = Bounds{-6.0, 6.0, -4.0, 4.0};

  if (name == "bottleneck") {
    // Corridor y in [-3, 3] split by a divider at x = 0 with one gap.
    const double gap = rng.uniform(1.2, 1.8);
    const double half = 0.5 * gap;
    auto& w = cfg.map.walls;
    w.push_back({{-6.0, -3.0}, {6.0, -3.0}});
    w.push_back({{-6.0, 3.0}, {6.0, 3.0}});
    w.push_back({{0.0, -3.0}, {0.0, -half}});
    w.push_back({{0.0, half}, {0.0, 3.0}});
    cfg.start = Pose{-4.5, 0.0, 0.0};
    cfg.goal = Vec2{4.0, 0.0};

    // The blocker waits beside the far side of the divider and slides across
    // the gap exit once the robot is close. Its rush speed is set so that it
    // parks in the exit just before a robot driving straight at full speed
    // would clear it.
    ObstacleSpec blocker;
    blocker.id = 0;
    const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
    blocker.position = Vec2{0.6, side * 2.4};
    blocker.waypoint = Vec2{0.6, 0.0};
    blocker.radius = 0.3;
    blocker.behavior = ObstacleBehavior::kGapBlocking;
    blocker.speed = 0.8;
    blocker.trigger_distance = rng.uniform(2.0, 2.6);
    const double lead = rng.uniform(-0.3, 0.3);
    const double travel = distance(blocker.position, blocker.waypoint);
    const double rush_time = blocker.trigger_distance / params.v_max - lead;
    blocker.rush_factor = travel / (rush_time * blocker.speed);
    blocker.dwell_steps = static_cast<int>(rng.uniform(15.0, 30.0));
    blocker.sigma = 0.02;
    cfg.obstacles.push_back(blocker);
  } else if (name == "warehouse-squeeze") {
    // Two shelving rows flank the main aisle (|y| < 0.8) and are cut by a
    // cross aisle (|x| < 0.75) where a forklift-like obstacle patrols.
    auto& w = cfg.map.walls;
    add_box(w, -3.5, -2.0, -0.75, -0.8);
    add_box(w, 0.75, -2.0, 3.5, -0.8);
    add_box(w, -3.5, 0.8, -0.75, 2.0);
    add_box(w, 0.75, 0.8, 3.5, 2.0);
    cfg.start = Pose{-4.5, 0.0, 0.0};
    cfg.goal = Vec2{4.5, 0.0};

    ObstacleSpec patrol;
    patrol.id = 0;
    patrol.radius = 0.3;
    patrol.behavior = ObstacleBehavior::kPatrolling;
    patrol.speed = 1.0;
    patrol.sigma = 0.02;
    const bool upward = rng.uniform() < 0.5;
    patrol.position = Vec2{0.0, upward ? -3.4 : 3.4};
    patrol.waypoint = Vec2{0.0, upward ? 3.4 : -3.4};
    // Time at which the patroller crosses the aisle centre line, placed around
    // the arrival time of a robot driving straight at full speed.
    const double greedy_arrival = -cfg.start.x / params.v_max;
    const double crossing_time = greedy_arrival + rng.uniform(-0.8, 0.8);
    const double len = patrol_length(patrol);
    const double cycle = 2.0 * len;
    double phase = std::fmod(0.5 * len - patrol.speed * crossing_time, cycle);
    if (phase < 0.0) phase += cycle;
    patrol.phase = phase;
    cfg.obstacles.push_back(patrol);
  } else if (name == "open-space") {
    cfg.start = Pose{-4.0, 0.0, 0.0};
    cfg.goal = Vec2{4.0, 0.0};
    ObstacleSpec slow;
    slow.id = 0;
    slow.position = Vec2{rng.uniform(-4.0, 4.0), 3.0};
    slow.radius = 0.3;
    slow.behavior = ObstacleBehavior::kCrossing;
    slow.speed = 0.2;
    slow.direction = Vec2{1.0, 0.0};
    slow.sigma = 0.02;
    cfg.obstacles.push_back(slow);
  } else {
    throw ConfigError("unknown environment '" + name + "'");
  }

  validate(cfg);
  WorldState state = initial_state(cfg, seed);
  return {std::move(cfg), std::move(state)};
}

WorldState initial_state(const EnvironmentConfig& config, std::uint64_t seed) {
  WorldState s;
  s.robot = config.start;
  s.robot.heading = normalize_angle(s.robot.heading);
  s.seed = seed;
  for (const ObstacleSpec& spec : config.obstacles) {
    ObstacleState o;
    o.direction = spec.direction;
    o.progress = spec.phase;
    o.nominal = spec.behavior == ObstacleBehavior::kPatrolling
                    ? patrol_position(spec, spec.phase)
                    : spec.position;
    o.position = o.nominal;
    s.obstacles.push_back(o);
  }
  for (int i = 0; i < config.params.command_delay; ++i) {
    s.pending.push_back(VelocityCommand{});
  }
  return s;
}

double world_clearance(const WorldState& state,
                       const EnvironmentConfig& config) {
  std::vector<Disc> discs;
  discs.reserve(state.obstacles.size());
  for (std::size_t i = 0; i < state.obstacles.size(); ++i) {
    discs.push_back({state.obstacles[i].position, config.obstacles[i].radius});
  }
  return clearance({state.robot.position(), config.params.robot_radius},
                   discs, config.map.walls, config.params.clearance_sentinel);
}

Observation observe(const WorldState& state, const EnvironmentConfig& config) {
  Observation obs;
  obs.robot = state.robot;
  obs.step = state.step;
  const double sigma = config.params.obs_sigma;
  for (std::size_t i = 0; i < state.obstacles.size(); ++i) {
    const ObstacleSpec& spec = config.obstacles[i];
    const Vec2 p = state.obstacles[i].position;
    if (distance(p, state.robot.position()) > config.params.sensing_radius) {
      continue;
    }
    ObservedObstacle o{spec.id, p, spec.radius};
    if (sigma > 0.0) {
      Rng rng(state.seed, Stream::kObservation,
              {static_cast<std::uint64_t>(state.step),
               static_cast<std::uint64_t>(spec.id)});
      o.position.x += sigma * rng.normal();
      o.position.y += sigma * rng.normal();
    }
    obs.obstacles.push_back(o);
  }
  return obs;
}

StepResult step_world(const WorldState& state, const VelocityCommand& cmd,
                      const EnvironmentConfig& config) {
  if (state.outcome != StepOutcome::kRunning) {
    throw UsageError("step_world called on a terminal state");
  }
  const WorldParams& p = config.params;
  StepResult result;
  WorldState next = state;
  const auto step_key = static_cast<std::uint64_t>(state.step);

  VelocityCommand applied = clamp_command(cmd, p.v_max, p.omega_max);
  if (p.command_delay > 0) {
    next.pending.push_back(applied);
    applied = next.pending.front();
    next.pending.pop_front();
  }
  if (p.act_sigma > 0.0) {
    Rng rng(state.seed, Stream::kActuation, {step_key});
    const double bound = 3.0 * p.act_sigma;
    const double ev = std::clamp(p.act_sigma * rng.normal(), -bound, bound);
    const double ew = std::clamp(p.act_sigma * rng.normal(), -bound, bound);
    applied.v *= 1.0 + ev;
    applied.omega *= 1.0 + ew;
  }
  applied = clamp_command(applied, p.v_max, p.omega_max);
  result.executed = applied;

  for (std::size_t i = 0; i < next.obstacles.size(); ++i) {
    const ObstacleSpec& spec = config.obstacles[i];
    ObstacleState& o = next.obstacles[i];
    advance_nominal(spec, o, state.robot, config.map.bounds, p.dt);
    if (spec.sigma > 0.0) {
      Rng rng(state.seed, Stream::kProcess,
              {step_key, static_cast<std::uint64_t>(spec.id)});
      o.drift.x += spec.sigma * p.dt * rng.normal();
      o.drift.y += spec.sigma * p.dt * rng.normal();
    }
    o.position = clamp_to(config.map.bounds, o.nominal + o.drift);
    o.velocity = (1.0 / p.dt) * (o.position - state.obstacles[i].position);
  }

  // Robot and obstacles are swept together in sub-steps so thin walls and
  // fast crossings cannot slip between two samples.
  const double sub_dt = p.dt / p.substeps;
  std::vector<Disc> discs(next.obstacles.size());
  double min_clear = std::numeric_limits<double>::infinity();
  Pose pose = state.robot;
  for (int k = 1; k <= p.substeps; ++k) {
    pose = step_unicycle(pose, applied, sub_dt);
    const double frac = static_cast<double>(k) / p.substeps;
    for (std::size_t i = 0; i < discs.size(); ++i) {
      const Vec2 a = state.obstacles[i].position;
      const Vec2 b = next.obstacles[i].position;
      discs[i] = {a + frac * (b - a), config.obstacles[i].radius};
    }
    min_clear = std::min(
        min_clear, clearance({pose.position(), p.robot_radius}, discs,
                             config.map.walls, p.clearance_sentinel));
  }
  next.robot = pose;
  next.step = state.step + 1;

  if (min_clear < 0.0) {
    next.outcome = StepOutcome::kCollision;
  } else if (goal_distance(next.robot, config.goal) <= p.goal_radius) {
    next.outcome = StepOutcome::kSuccess;
  } else if (next.step >= p.max_steps) {
    next.outcome = StepOutcome::kTimeout;
  } else {
    next.outcome = StepOutcome::kRunning;
  }

  result.clearance = min_clear;
  result.outcome = next.outcome;
  result.observation = observe(next, config);
  result.state = std::move(next);
  return result;
}

}  // namespace rcsp
