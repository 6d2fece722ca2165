#pragma once

#include <vector>

#include "rcsp/belief.hpp"
#include "rcsp/geometry.hpp"
#include "rcsp/planner.hpp"
#include "rcsp/world.hpp"

namespace rcsp {

struct FilterParams {
  double c_hard = 0.15;
  double kappa = 0.5;
  int horizon = 10;
  double w_progress = 1.0;
  double w_clearance = 2.0;
  double w_deviation = 0.5;
  double penalty = 1e3;
  // Clearance term uses min(c_min, clearance_cap); 0 leaves it uncapped.
  double clearance_cap = 0.5;

  void validate() const;
};

struct FilterRollout {
  double c_min = 0.0;     // includes the current pose (step 0)
  double c_future = 0.0;  // minimum over steps 1..H_f only
  double progress = 0.0;  // goal-distance reduction over the horizon
};

/// Short local rollout: the robot holds `u`, visible obstacles move on at
/// their tracked mean velocities (zero when untracked). No sampling.
FilterRollout filter_rollout(const VelocityCommand& u, const Observation& obs,
                             const BeliefMap& beliefs, const StaticMap& map,
                             Vec2 goal, int horizon, double dt,
                             double robot_radius,
                             double sentinel = kDefaultClearanceSentinel);

/// c_min >= c_hard and (c_min - c_hard) + kappa (c_t - c_hard) >= 0.
bool is_feasible(double c_t, double c_min, const FilterParams& params);

struct FilterCandidate {
  VelocityCommand command;
  FilterRollout rollout;
  bool feasible = false;
  double score = 0.0;
};

struct FilterDecision {
  VelocityCommand command;
  std::size_t index = 0;           // into candidates; 0 is the nominal
  double current_clearance = 0.0;
  bool any_feasible = false;
  std::vector<FilterCandidate> candidates;
};

/// Evaluates {u_nom} ∪ lattice and returns the best-scoring candidate,
/// score = w_p progress + w_c min(c_min, cap) - w_d |u - u_nom|
///         - penalty [infeasible],
/// with omega scaled by v_max / omega_max in the deviation norm. A feasible
/// candidate always wins over an infeasible one. When nothing is feasible
/// the candidate with the largest c_min is returned, ties going to the
/// largest clearance over the future steps.
///
/// The filter sees only the observation, the tracked velocities and the
/// map; it has no access to the posterior, scenarios or CVaR values.
FilterDecision apply_filter(const VelocityCommand& u_nom,
                            const Observation& obs, const BeliefMap& beliefs,
                            const CommandLattice& lattice, Vec2 goal,
                            const StaticMap& map, const FilterParams& params,
                            double dt, double robot_radius,
                            double sentinel = kDefaultClearanceSentinel);

}  // namespace rcsp
