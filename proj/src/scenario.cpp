#include "rcsp/scenario.hpp"

#include <algorithm>
#include <numeric>

#include "rcsp/errors.hpp"
#include "rcsp/random.hpp"

namespace rcsp {

namespace {

// One obstacle step under a conjecture. Aggressive obstacles keep the
// blended velocity so pursuit builds up; the other kinds keep their base
// velocity and rescale it every step.
void advance_obstacle(const Conjecture& model, Vec2& position, Vec2& velocity,
                      Vec2 noise, const Pose& robot, double dt) {
  const Vec2 v = conjectured_velocity(model, position, velocity, robot);
  position += dt * (v + noise);
  if (model.kind == ConjectureKind::kAggressive) velocity = v;
}

}  // namespace

std::vector<std::pair<std::size_t, double>> top_k_mixture(
    const Posterior& posterior, int top_k) {
  const std::size_t n = posterior.weights.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return posterior.weights[a] > posterior.weights[b];
                   });
  const std::size_t keep =
      top_k <= 0 ? n : std::min(n, static_cast<std::size_t>(top_k));
  order.resize(keep);
  std::sort(order.begin(), order.end());
  double total = 0.0;
  for (std::size_t i : order) total += posterior.weights[i];
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(keep);
  for (std::size_t i : order) out.emplace_back(i, posterior.weights[i] / total);
  return out;
}

ScenarioBatch sample_batch(const InformationState& info, int n_scenarios,
                           int horizon, int top_k, double dt,
                           std::uint64_t seed, int step) {
  if (n_scenarios < 1 || horizon < 1) {
    throw UsageError("sample_batch needs N >= 1 and H >= 1");
  }
  if (info.family.empty() ||
      info.family.size() != info.posterior.weights.size()) {
    throw UsageError("posterior does not match the conjecture family");
  }
  if (top_k > static_cast<int>(info.family.size())) {
    throw UsageError("top_k exceeds the family size");
  }
  const auto mixture = top_k_mixture(info.posterior, top_k);
  const auto step_key = static_cast<std::uint64_t>(step);

  ScenarioBatch batch;
  batch.step = step;
  batch.seed = seed;
  batch.dt = dt;
  batch.scenarios.resize(static_cast<std::size_t>(n_scenarios));
  for (int i = 0; i < n_scenarios; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    Scenario& sc = batch.scenarios[static_cast<std::size_t>(i)];

    Rng pick(seed, Stream::kConjecture, {step_key, idx});
    const double u = pick.uniform();
    double acc = 0.0;
    sc.conjecture = mixture.back().first;
    for (const auto& [id, w] : mixture) {
      acc += w;
      if (u < acc) {
        sc.conjecture = id;
        break;
      }
    }
    sc.model = info.family[sc.conjecture];

    Rng state_rng(seed, Stream::kObstacleState, {step_key, idx});
    sc.initial = sample_obstacle_state(info.beliefs, state_rng);

    const std::size_t m = sc.initial.size();
    sc.noise.assign(static_cast<std::size_t>(horizon), std::vector<Vec2>(m));
    for (std::size_t j = 0; j < m; ++j) {
      Rng noise_rng(seed, Stream::kScenarioNoise,
                    {step_key, idx, static_cast<std::uint64_t>(j)});
      for (int k = 0; k < horizon; ++k) {
        Vec2& n = sc.noise[static_cast<std::size_t>(k)][j];
        n.x = sc.model.sigma * noise_rng.normal();
        n.y = sc.model.sigma * noise_rng.normal();
      }
    }

    std::vector<Vec2> pos(m), vel(m);
    for (std::size_t j = 0; j < m; ++j) {
      pos[j] = sc.initial[j].position;
      vel[j] = sc.initial[j].velocity;
    }
    sc.trajectory.assign(static_cast<std::size_t>(horizon),
                         std::vector<Vec2>(m));
    for (int k = 0; k < horizon; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      for (std::size_t j = 0; j < m; ++j) {
        advance_obstacle(sc.model, pos[j], vel[j], sc.noise[kk][j], info.robot,
                         dt);
      }
      sc.trajectory[kk] = pos;
    }
  }
  return batch;
}

RobotRollout rollout_command(const VelocityCommand& u, const Pose& start,
                             const Scenario& scenario, const StaticMap& map,
                             double dt, double robot_radius, double sentinel) {
  const std::size_t horizon = scenario.horizon();
  const std::size_t m = scenario.initial.size();
  RobotRollout out;
  out.states.reserve(horizon);
  out.clearances.reserve(horizon);

  const bool reactive = scenario.model.reactive();
  std::vector<Vec2> pos(m), vel(m);
  for (std::size_t j = 0; j < m; ++j) {
    pos[j] = scenario.initial[j].position;
    vel[j] = scenario.initial[j].velocity;
  }
  std::vector<Disc> discs(m);
  Pose robot = start;
  for (std::size_t k = 0; k < horizon; ++k) {
    if (reactive) {
      // Obstacles react to the robot pose at the start of the step.
      for (std::size_t j = 0; j < m; ++j) {
        advance_obstacle(scenario.model, pos[j], vel[j], scenario.noise[k][j],
                         robot, dt);
      }
    }
    robot = step_unicycle(robot, u, dt);
    const std::vector<Vec2>& at = reactive ? pos : scenario.trajectory[k];
    for (std::size_t j = 0; j < m; ++j) {
      discs[j] = {at[j], scenario.initial[j].radius};
    }
    out.states.push_back(robot);
    out.clearances.push_back(clearance({robot.position(), robot_radius},
                                       discs, map.walls, sentinel));
  }
  return out;
}

double progress_reward(const RobotRollout& rollout, const Pose& start,
                       Vec2 goal) {
  if (rollout.states.empty()) return 0.0;
  return goal_distance(start, goal) - goal_distance(rollout.states.back(), goal);
}

double trajectory_risk(const RobotRollout& rollout, double c_safe) {
  if (!(c_safe > 0.0)) throw UsageError("c_safe must be positive");
  double worst = 0.0;
  for (double c : rollout.clearances) {
    worst = std::max(worst, std::clamp((c_safe - c) / c_safe, 0.0, 1.0));
  }
  return worst;
}

}  // namespace rcsp
