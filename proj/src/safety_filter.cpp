#include "rcsp/safety_filter.hpp"

#include <algorithm>
#include <cmath>

#include "rcsp/errors.hpp"

namespace rcsp {

void FilterParams::validate() const {
  if (!(c_hard > 0.0) || !(kappa > 0.0) || horizon <= 0 ||
      !(w_progress > 0.0) || !(w_clearance > 0.0) || !(w_deviation > 0.0) ||
      !(penalty > 0.0) || clearance_cap < 0.0) {
    throw ConfigError("safety filter parameters must all be positive");
  }
}

FilterRollout filter_rollout(const VelocityCommand& u, const Observation& obs,
                             const BeliefMap& beliefs, const StaticMap& map,
                             Vec2 goal, int horizon, double dt,
                             double robot_radius, double sentinel) {
  const std::size_t m = obs.obstacles.size();
  std::vector<Disc> discs(m);
  std::vector<Vec2> vel(m);
  for (std::size_t j = 0; j < m; ++j) {
    const ObservedObstacle& o = obs.obstacles[j];
    discs[j] = {o.position, o.radius};
    auto it = beliefs.find(o.id);
    if (it != beliefs.end()) vel[j] = it->second.velocity;
  }
  Pose robot = obs.robot;
  FilterRollout out;
  const double c_now = clearance({robot.position(), robot_radius}, discs,
                                 map.walls, sentinel);
  out.c_future = sentinel;
  for (int k = 0; k < horizon; ++k) {
    robot = step_unicycle(robot, u, dt);
    for (std::size_t j = 0; j < m; ++j) discs[j].center += dt * vel[j];
    out.c_future = std::min(out.c_future,
                            clearance({robot.position(), robot_radius}, discs,
                                      map.walls, sentinel));
  }
  out.c_min = std::min(c_now, out.c_future);
  out.progress = goal_distance(obs.robot, goal) - goal_distance(robot, goal);
  return out;
}

bool is_feasible(double c_t, double c_min, const FilterParams& params) {
  return c_min >= params.c_hard &&
         (c_min - params.c_hard) + params.kappa * (c_t - params.c_hard) >= 0.0;
}

FilterDecision apply_filter(const VelocityCommand& u_nom,
                            const Observation& obs, const BeliefMap& beliefs,
                            const CommandLattice& lattice, Vec2 goal,
                            const StaticMap& map, const FilterParams& params,
                            double dt, double robot_radius, double sentinel) {
  if (lattice.commands.empty()) throw UsageError("empty command lattice");
  std::vector<Disc> discs;
  for (const ObservedObstacle& o : obs.obstacles) {
    discs.push_back({o.position, o.radius});
  }
  FilterDecision d;
  d.current_clearance = clearance({obs.robot.position(), robot_radius}, discs,
                                  map.walls, sentinel);
  const double omega_scale = lattice.v_max / lattice.omega_max;

  d.candidates.reserve(lattice.commands.size() + 1);
  auto evaluate = [&](const VelocityCommand& u) {
    FilterCandidate c;
    c.command = u;
    c.rollout = filter_rollout(u, obs, beliefs, map, goal, params.horizon, dt,
                               robot_radius, sentinel);
    c.feasible = is_feasible(d.current_clearance, c.rollout.c_min, params);
    const double dv = u.v - u_nom.v;
    const double dw = (u.omega - u_nom.omega) * omega_scale;
    const double c_term = params.clearance_cap > 0.0
                              ? std::min(c.rollout.c_min, params.clearance_cap)
                              : c.rollout.c_min;
    c.score = params.w_progress * c.rollout.progress +
              params.w_clearance * c_term -
              params.w_deviation * std::hypot(dv, dw) -
              (c.feasible ? 0.0 : params.penalty);
    d.any_feasible = d.any_feasible || c.feasible;
    d.candidates.push_back(c);
  };
  evaluate(u_nom);
  for (const VelocityCommand& u : lattice.commands) evaluate(u);

  auto better = [&](const FilterCandidate& a, const FilterCandidate& b,
                    double key_a, double key_b) {
    if (key_a != key_b) return key_a > key_b;
    return prefer_on_tie(a.command, b.command, lattice.v_max);
  };
  std::size_t best = d.candidates.size();
  for (std::size_t i = 0; i < d.candidates.size(); ++i) {
    const FilterCandidate& c = d.candidates[i];
    if (d.any_feasible && !c.feasible) continue;
    if (best == d.candidates.size()) {
      best = i;
      continue;
    }
    const FilterCandidate& b = d.candidates[best];
    bool wins = false;
    if (d.any_feasible) {
      wins = better(c, b, c.score, b.score);
    } else if (c.rollout.c_min != b.rollout.c_min) {
      wins = c.rollout.c_min > b.rollout.c_min;
    } else {
      // Equal c_min usually means the current clearance is the minimum for
      // every candidate; prefer the one that opens the most room.
      wins = better(c, b, c.rollout.c_future, b.rollout.c_future);
    }
    if (wins) best = i;
  }
  d.index = best;
  d.command = d.candidates[best].command;
  return d;
}

}  // namespace rcsp
