#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcsp/belief.hpp"
#include "rcsp/planner.hpp"
#include "rcsp/safety_filter.hpp"
#include "rcsp/world.hpp"

namespace rcsp {

enum class ControllerKind {
  kRcspFull,
  kRcspFixedPredictor,
  kMeanRiskFilter,
  kCvarOnly,
  kDwaStyle,
  kGoalPd,
};

const char* to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(const std::string& name);
const std::vector<ControllerKind>& all_controller_kinds();

struct BeliefParams {
  std::vector<Conjecture> family = default_family();
  double tau = 2.0;
  double floor = 0.02;
  double smoothing = 0.5;
  double initial_variance = 1.0;
  double stale_inflation = 0.05;
  double likelihood_slack = 0.05;  // sigma_like = obs_sigma + slack
};

struct LatticeParams {
  std::vector<double> v_levels = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> omega_levels = {-1.0, -0.5, 0.0, 0.5, 1.0};
};

struct DwaParams {
  double w_heading = 1.0;
  double w_clearance = 2.0;
  double w_velocity = 0.5;
  double clearance_cap = 0.3;  // clearance term saturates here (m)
};

struct GoalPdParams {
  double k_heading = 2.0;
  double k_speed = 1.0;
};

struct ControllerParams {
  BeliefParams belief;
  PlannerParams planner;
  FilterParams filter;
  LatticeParams lattice;
  DwaParams dwa;
  GoalPdParams goal_pd;
};

/// What a controller did at one decision step.
struct Decision {
  VelocityCommand nominal;  // planner output before filtering
  VelocityCommand command;  // command sent to the robot
  std::optional<double> tail_risk;  // risk term of the nominal command
  bool filter_applied = false;
  bool nominal_feasible = true;
  std::vector<double> posterior;
  double posterior_entropy = 0.0;
};

/// One controller instance per episode. RCSP variants keep the obstacle
/// tracks and the conjecture posterior between calls.
class Controller {
 public:
  Controller(ControllerKind kind, const EnvironmentConfig& env,
             const ControllerParams& params, std::uint64_t seed);

  Decision decide(const Observation& obs);

  [[nodiscard]] ControllerKind kind() const { return kind_; }
  [[nodiscard]] const Posterior& posterior() const { return posterior_; }
  [[nodiscard]] const BeliefMap& beliefs() const { return beliefs_; }
  [[nodiscard]] const CommandLattice& lattice() const { return lattice_; }

 private:
  void assimilate(const Observation& obs);
  Decision decide_rcsp(const Observation& obs);
  Decision decide_dwa(const Observation& obs) const;
  Decision decide_goal_pd(const Observation& obs) const;

  ControllerKind kind_;
  EnvironmentConfig env_;
  ControllerParams params_;
  std::uint64_t seed_;
  CommandLattice lattice_;
  TrackerParams tracker_;
  double sigma_like_;
  BeliefMap beliefs_;
  Posterior posterior_;
  std::optional<Pose> last_robot_;
  bool has_history_ = false;
};

/// DWA-style one-step scoring over the lattice against the current
/// observation (obstacles treated as static). Commands whose one-step
/// clearance is negative are pruned; returns (0, 0) when all are pruned.
VelocityCommand dwa_command(const Observation& obs, const StaticMap& map,
                            Vec2 goal, const CommandLattice& lattice,
                            const DwaParams& params, double dt,
                            double robot_radius, double sentinel);

/// Proportional heading and speed law toward the goal, clamped to limits.
VelocityCommand goal_pd_command(const Pose& pose, Vec2 goal,
                                const GoalPdParams& params, double v_max,
                                double omega_max);

}  // namespace rcsp
