#include "rcsp/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rcsp/errors.hpp"
#include "rcsp/scenario.hpp"

namespace rcsp {

const char* to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kRcspFull:
      return "rcsp-full";
    case ControllerKind::kRcspFixedPredictor:
      return "rcsp-fixed-predictor";
    case ControllerKind::kMeanRiskFilter:
      return "mean-risk-filter";
    case ControllerKind::kCvarOnly:
      return "cvar-only";
    case ControllerKind::kDwaStyle:
      return "dwa-style";
    case ControllerKind::kGoalPd:
      return "goal-pd";
  }
  return "unknown";
}

ControllerKind controller_kind_from_string(const std::string& name) {
  for (ControllerKind k : all_controller_kinds()) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown controller '" + name + "'");
}

const std::vector<ControllerKind>& all_controller_kinds() {
  static const std::vector<ControllerKind> kinds = {
      ControllerKind::kRcspFull,       ControllerKind::kRcspFixedPredictor,
      ControllerKind::kMeanRiskFilter, ControllerKind::kCvarOnly,
      ControllerKind::kDwaStyle,       ControllerKind::kGoalPd};
  return kinds;
}

Controller::Controller(ControllerKind kind, const EnvironmentConfig& env,
                       const ControllerParams& params, std::uint64_t seed)
    : kind_(kind),
      env_(env),
      params_(params),
      seed_(seed),
      lattice_(CommandLattice::grid(env.params.v_max, env.params.omega_max,
                                    params.lattice.v_levels,
                                    params.lattice.omega_levels)),
      sigma_like_(env.params.obs_sigma + params.belief.likelihood_slack),
      posterior_(Posterior::uniform(params.belief.family.size())) {
  lattice_.validate();
  params_.planner.validate();
  params_.filter.validate();
  if (params_.belief.family.empty()) {
    throw ConfigError("conjecture family is empty");
  }
  tracker_.smoothing = params.belief.smoothing;
  tracker_.obs_sigma = env.params.obs_sigma;
  tracker_.initial_variance = params.belief.initial_variance;
  tracker_.stale_inflation = params.belief.stale_inflation;
  if (!(tracker_.smoothing > 0.0 && tracker_.smoothing <= 1.0)) {
    throw ConfigError("tracker smoothing must be in (0, 1]");
  }
}

void Controller::assimilate(const Observation& obs) {
  const double dt = env_.params.dt;
  const bool update = kind_ != ControllerKind::kRcspFixedPredictor;
  if (update && has_history_ && last_robot_) {
    std::vector<double> logs;
    logs.reserve(params_.belief.family.size());
    for (const Conjecture& c : params_.belief.family) {
      logs.push_back(
          log_likelihood(c, beliefs_, obs, *last_robot_, dt, sigma_like_));
    }
    posterior_ = update_posterior_log(posterior_, logs, params_.belief.tau,
                                      params_.belief.floor);
  }
  beliefs_ = track_obstacles(beliefs_, obs, dt, tracker_);
  last_robot_ = obs.robot;
  has_history_ = true;
}

Decision Controller::decide(const Observation& obs) {
  switch (kind_) {
    case ControllerKind::kDwaStyle:
      return decide_dwa(obs);
    case ControllerKind::kGoalPd:
      return decide_goal_pd(obs);
    default:
      return decide_rcsp(obs);
  }
}

Decision Controller::decide_rcsp(const Observation& obs) {
  assimilate(obs);

  PlannerParams planner = params_.planner;
  if (kind_ == ControllerKind::kMeanRiskFilter) {
    planner.objective = Objective::kMean;
  } else {
    planner.objective = Objective::kCvar;
  }

  InformationState info;
  info.map = env_.map;
  info.family = params_.belief.family;
  info.beliefs = beliefs_;
  info.posterior = posterior_;
  info.robot = obs.robot;
  info.goal = env_.goal;

  const ScenarioBatch batch =
      sample_batch(info, planner.scenarios, planner.horizon, planner.top_k,
                   env_.params.dt, seed_, obs.step);
  const Selection sel = select_command(info, lattice_, batch, planner,
                                       env_.params.robot_radius);

  Decision d;
  d.nominal = sel.nominal;
  d.command = sel.nominal;
  d.tail_risk = sel.scores[sel.index].tail_risk;
  d.posterior = posterior_.weights;
  d.posterior_entropy = posterior_.entropy();
  if (kind_ != ControllerKind::kCvarOnly) {
    const FilterDecision f = apply_filter(
        sel.nominal, obs, beliefs_, lattice_, env_.goal, env_.map,
        params_.filter, env_.params.dt, env_.params.robot_radius,
        env_.params.clearance_sentinel);
    d.command = f.command;
    d.filter_applied = true;
    d.nominal_feasible = f.candidates.front().feasible;
  }
  return d;
}

Decision Controller::decide_dwa(const Observation& obs) const {
  Decision d;
  d.command = dwa_command(obs, env_.map, env_.goal, lattice_, params_.dwa,
                          env_.params.dt, env_.params.robot_radius,
                          env_.params.clearance_sentinel);
  d.nominal = d.command;
  return d;
}

Decision Controller::decide_goal_pd(const Observation& obs) const {
  Decision d;
  d.command = goal_pd_command(obs.robot, env_.goal, params_.goal_pd,
                              env_.params.v_max, env_.params.omega_max);
  d.nominal = d.command;
  return d;
}

VelocityCommand dwa_command(const Observation& obs, const StaticMap& map,
                            Vec2 goal, const CommandLattice& lattice,
                            const DwaParams& params, double dt,
                            double robot_radius, double sentinel) {
  std::vector<Disc> discs;
  for (const ObservedObstacle& o : obs.obstacles) {
    discs.push_back({o.position, o.radius});
  }
  bool found = false;
  VelocityCommand best_cmd{};
  double best = 0.0;
  for (const VelocityCommand& u : lattice.commands) {
    const Pose next = step_unicycle(obs.robot, u, dt);
    const double c =
        clearance({next.position(), robot_radius}, discs, map.walls, sentinel);
    if (c < 0.0) continue;
    const Vec2 to_goal = goal - next.position();
    const double bearing = std::atan2(to_goal.y, to_goal.x);
    const double err = std::abs(normalize_angle(bearing - next.heading));
    const double heading_term = (std::numbers::pi - err) / std::numbers::pi;
    const double clear_term =
        std::min(c, params.clearance_cap) / params.clearance_cap;
    const double speed_term = u.v / lattice.v_max;
    const double score = params.w_heading * heading_term +
                         params.w_clearance * clear_term +
                         params.w_velocity * speed_term;
    if (!found || score > best ||
        (score == best && prefer_on_tie(u, best_cmd, lattice.v_max))) {
      found = true;
      best = score;
      best_cmd = u;
    }
  }
  return found ? best_cmd : VelocityCommand{};
}

VelocityCommand goal_pd_command(const Pose& pose, Vec2 goal,
                                const GoalPdParams& params, double v_max,
                                double omega_max) {
  const Vec2 to_goal = goal - pose.position();
  const double dist = to_goal.norm();
  const double err =
      normalize_angle(std::atan2(to_goal.y, to_goal.x) - pose.heading);
  VelocityCommand u;
  u.omega = params.k_heading * err;
  u.v = params.k_speed * dist * std::max(std::cos(err), 0.0);
  return clamp_command(u, v_max, omega_max);
}

}  // namespace rcsp
