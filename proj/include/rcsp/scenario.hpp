#pragma once

#include <cstdint>
#include <vector>

#include "rcsp/belief.hpp"
#include "rcsp/geometry.hpp"
#include "rcsp/world.hpp"

namespace rcsp {

/// One sampled short-horizon future of every tracked obstacle.
struct Scenario {
  std::size_t conjecture = 0;
  Conjecture model;
  std::vector<SampledObstacle> initial;
  /// trajectory[k][j]: position of obstacle j after k + 1 steps, computed
  /// with the robot held at its decision-time pose. Reactive models are
  /// re-rolled against each candidate's own robot path in rollout_command.
  std::vector<std::vector<Vec2>> trajectory;
  /// noise[k][j]: process-noise velocity (m/s) applied at step k + 1.
  std::vector<std::vector<Vec2>> noise;

  [[nodiscard]] std::size_t horizon() const { return trajectory.size(); }
};

struct ScenarioBatch {
  std::vector<Scenario> scenarios;
  int step = 0;
  std::uint64_t seed = 0;
  double dt = 0.1;
};

struct RobotRollout {
  std::vector<Pose> states;       // poses after steps 1..H
  std::vector<double> clearances;  // clearance at each of those poses
};

/// Conjecture indices kept for sampling: the `top_k` heaviest entries
/// (ties to the lower index) with weights renormalised; top_k <= 0 or
/// >= |family| keeps the whole posterior.
std::vector<std::pair<std::size_t, double>> top_k_mixture(
    const Posterior& posterior, int top_k);

/// Draws N scenarios of horizon H from the posterior mixture. Every random
/// draw comes from a substream keyed by (seed, step, scenario, obstacle), so
/// the batch does not depend on evaluation order.
ScenarioBatch sample_batch(const InformationState& info, int n_scenarios,
                           int horizon, int top_k, double dt,
                           std::uint64_t seed, int step);

/// Holds `u` for the scenario's horizon and records the clearance at every
/// step against that scenario's obstacles and the static walls.
RobotRollout rollout_command(const VelocityCommand& u, const Pose& start,
                             const Scenario& scenario, const StaticMap& map,
                             double dt, double robot_radius,
                             double sentinel = kDefaultClearanceSentinel);

/// Reduction in goal distance between the start and the final rollout pose.
double progress_reward(const RobotRollout& rollout, const Pose& start,
                       Vec2 goal);

/// max over steps of clamp((c_safe - clearance) / c_safe, 0, 1).
double trajectory_risk(const RobotRollout& rollout, double c_safe);

}  // namespace rcsp
