#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "rcsp/geometry.hpp"

namespace rcsp {

struct Bounds {
  double x_min = -6.0;
  double x_max = 6.0;
  double y_min = -4.0;
  double y_max = 4.0;

  [[nodiscard]] bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

struct StaticMap {
  std::vector<WallSegment> walls;
  Bounds bounds;
};

enum class ObstacleBehavior { kCrossing, kPatrolling, kGapBlocking };

const char* to_string(ObstacleBehavior behavior);
ObstacleBehavior behavior_from_string(const std::string& name);

/// Scripted moving obstacle. Which of the trailing fields matter depends on
/// the behavior:
///   crossing     - `direction` (unit vector), reflected at the map bounds
///   patrolling   - shuttles between `position` and `waypoint`; `phase` is the
///                  distance already travelled along the out-and-back cycle
///   gap-blocking - parked at `position` until the robot comes within
///                  `trigger_distance` of `waypoint`, then rushes there at
///                  `speed * rush_factor`, holds for `dwell_steps`, and
///                  returns home at `speed`. Fires once per episode.
struct ObstacleSpec {
  int id = 0;
  Vec2 position;
  double radius = 0.3;
  ObstacleBehavior behavior = ObstacleBehavior::kCrossing;
  double speed = 0.0;
  double trigger_distance = 0.0;
  double sigma = 0.0;  // process noise, m/s per step
  Vec2 direction{1.0, 0.0};
  Vec2 waypoint;
  double phase = 0.0;
  double rush_factor = 1.0;
  int dwell_steps = 0;
};

/// Simulator settings shared by every environment.
struct WorldParams {
  double dt = 0.1;
  int max_steps = 600;
  double v_max = 1.0;
  double omega_max = 1.5;
  double robot_radius = 0.25;
  double goal_radius = 0.3;
  double obs_sigma = 0.02;
  double sensing_radius = 8.0;
  double act_sigma = 0.05;
  int command_delay = 0;
  int substeps = 4;
  double clearance_sentinel = kDefaultClearanceSentinel;
};

struct EnvironmentConfig {
  std::string name;
  StaticMap map;
  std::vector<ObstacleSpec> obstacles;
  Pose start;
  Vec2 goal;
  WorldParams params;
};

/// Throws ConfigError when the invariants of the config do not hold.
void validate(const EnvironmentConfig& config);

struct ObservedObstacle {
  int id = 0;
  Vec2 position;
  double radius = 0.0;
};

struct Observation {
  Pose robot;
  std::vector<ObservedObstacle> obstacles;
  int step = 0;
};

enum class BlockerMode { kIdle, kClosing, kDwell, kReturning, kDone };

struct ObstacleState {
  Vec2 position;
  Vec2 velocity;
  Vec2 nominal;  // scripted position before process-noise drift
  Vec2 drift;
  Vec2 direction;        // crossing heading after reflections
  double progress = 0.;  // patrol cycle position, meters
  BlockerMode mode = BlockerMode::kIdle;
  int dwell_left = 0;
};

enum class StepOutcome { kRunning, kSuccess, kCollision, kTimeout };

const char* to_string(StepOutcome outcome);

struct WorldState {
  Pose robot;
  std::vector<ObstacleState> obstacles;
  int step = 0;
  std::uint64_t seed = 0;
  std::deque<VelocityCommand> pending;  // commands waiting out the delay
  StepOutcome outcome = StepOutcome::kRunning;
};

struct StepResult {
  WorldState state;
  Observation observation;
  StepOutcome outcome = StepOutcome::kRunning;
  double clearance = 0.0;  // minimum over the sub-steps
  VelocityCommand executed;  // after delay and actuation noise
};

/// Names accepted by build_environment.
const std::vector<std::string>& environment_names();

/// Builds one of the canned scenes; the seed sets geometry jitter and
/// obstacle phase offsets. Throws ConfigError for unknown names.
std::pair<EnvironmentConfig, WorldState> build_environment(
    const std::string& name, std::uint64_t seed,
    const WorldParams& params = {});

/// Fresh state for an existing config.
WorldState initial_state(const EnvironmentConfig& config, std::uint64_t seed);

/// Current robot-obstacle clearance using true obstacle positions.
double world_clearance(const WorldState& state,
                       const EnvironmentConfig& config);

Observation observe(const WorldState& state, const EnvironmentConfig& config);

/// Advances the world one control period. Throws UsageError if the state is
/// already terminal.
StepResult step_world(const WorldState& state, const VelocityCommand& cmd,
                      const EnvironmentConfig& config);

}  // namespace rcsp
