#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcsp/belief.hpp"
#include "rcsp/geometry.hpp"
#include "rcsp/scenario.hpp"

namespace rcsp {

/// Finite command set shared by the planner and the safety filter.
struct CommandLattice {
  std::vector<VelocityCommand> commands;
  double v_max = 1.0;
  double omega_max = 1.5;

  /// Cartesian product of v_levels * v_max and omega_levels * omega_max.
  static CommandLattice grid(double v_max, double omega_max,
                             std::span<const double> v_levels,
                             std::span<const double> omega_levels);
  /// 5 x 5 grid: v in {0, .25, .5, .75, 1} v_max, omega in {-1, -.5, 0, .5, 1}
  /// omega_max.
  static CommandLattice make_default(double v_max, double omega_max);

  /// Throws ConfigError unless nonempty, within limits, and containing (0, 0).
  void validate() const;
};

enum class Objective { kCvar, kMean, kWorst };

/// Tail-size convention for the empirical CVaR.
///   kFractional - m = alpha N with a fractional weight on the boundary
///                 sample (equals the quantile-integral definition)
///   kCeilCount  - plain average of the ceil(alpha N) largest samples
enum class TailRule { kFractional, kCeilCount };

const char* to_string(Objective objective);
Objective objective_from_string(const std::string& name);
const char* to_string(TailRule rule);
TailRule tail_rule_from_string(const std::string& name);

struct PlannerParams {
  int scenarios = 64;
  int horizon = 20;
  double alpha = 0.1;
  double lambda = 2.0;
  Objective objective = Objective::kCvar;
  int top_k = 0;  // <= 0 means the whole family
  double c_safe = 0.5;
  TailRule tail_rule = TailRule::kFractional;

  void validate() const;
};

/// Upper-tail CVaR of the sample: the average of the largest alpha fraction.
/// alpha = 1 is the sample mean; alpha * N <= 1 is the sample maximum.
/// Throws UsageError on empty input or alpha outside (0, 1].
double empirical_cvar(std::span<const double> risks, double alpha,
                      TailRule rule = TailRule::kFractional);

/// min over eta of eta + E[(X - eta)_+] / alpha on the empirical
/// distribution. The objective is piecewise linear with breakpoints at the
/// samples, so scanning the samples finds the minimum.
double cvar_via_threshold(std::span<const double> risks, double alpha);

struct CommandScore {
  VelocityCommand command;
  double mean_reward = 0.0;
  double tail_risk = 0.0;
  double objective = 0.0;  // mean_reward - lambda * tail_risk
  std::vector<double> rewards;
  std::vector<double> risks;
};

/// Tail term of the configured objective: CVaR, mean, or max of the risks.
double tail_term(std::span<const double> risks, const PlannerParams& params);

/// Builds a score from per-scenario rewards and risks.
CommandScore assemble_score(const VelocityCommand& u,
                            std::vector<double> rewards,
                            std::vector<double> risks,
                            const PlannerParams& params);

CommandScore score_command(const VelocityCommand& u, const ScenarioBatch& batch,
                           const Pose& start, Vec2 goal, const StaticMap& map,
                           const PlannerParams& params, double robot_radius);

/// Index of the best score. Ties resolve by smaller |omega|, then smaller
/// |v - v_max / 2|, then lattice order.
std::size_t best_score_index(std::span<const CommandScore> scores,
                             double v_max);

struct Selection {
  VelocityCommand nominal;
  std::size_t index = 0;
  std::vector<CommandScore> scores;
};

Selection select_command(const InformationState& info,
                         const CommandLattice& lattice,
                         const ScenarioBatch& batch,
                         const PlannerParams& params, double robot_radius);

/// Tie-break key used by the planner and the filter (smaller is better).
bool prefer_on_tie(const VelocityCommand& a, const VelocityCommand& b,
                   double v_max);

}  // namespace rcsp
