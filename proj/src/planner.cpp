#include "rcsp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "rcsp/errors.hpp"

namespace rcsp {

CommandLattice CommandLattice::grid(double v_max, double omega_max,
                                    std::span<const double> v_levels,
                                    std::span<const double> omega_levels) {
  CommandLattice lattice;
  lattice.v_max = v_max;
  lattice.omega_max = omega_max;
  for (double v : v_levels) {
    for (double w : omega_levels) {
      lattice.commands.push_back({v * v_max, w * omega_max});
    }
  }
  return lattice;
}

CommandLattice CommandLattice::make_default(double v_max, double omega_max) {
  static constexpr double kV[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  static constexpr double kW[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  return grid(v_max, omega_max, kV, kW);
}

void CommandLattice::validate() const {
  if (commands.empty()) throw ConfigError("command lattice is empty");
  bool has_stop = false;
  for (const VelocityCommand& c : commands) {
    if (std::abs(c.v) > v_max || std::abs(c.omega) > omega_max) {
      throw ConfigError("lattice command outside velocity limits");
    }
    if (c.v == 0.0 && c.omega == 0.0) has_stop = true;
  }
  if (!has_stop) throw ConfigError("command lattice must contain (0, 0)");
}

const char* to_string(Objective objective) {
  switch (objective) {
    case Objective::kCvar:
      return "cvar";
    case Objective::kMean:
      return "mean";
    case Objective::kWorst:
      return "worst";
  }
  return "unknown";
}

Objective objective_from_string(const std::string& name) {
  if (name == "cvar") return Objective::kCvar;
  if (name == "mean") return Objective::kMean;
  if (name == "worst") return Objective::kWorst;
  throw ConfigError("unknown objective '" + name + "'");
}

const char* to_string(TailRule rule) {
  return rule == TailRule::kFractional ? "fractional" : "ceil";
}

TailRule tail_rule_from_string(const std::string& name) {
  if (name == "fractional") return TailRule::kFractional;
  if (name == "ceil") return TailRule::kCeilCount;
  throw ConfigError("unknown tail rule '" + name + "'");
}

void PlannerParams::validate() const {
  if (scenarios < 1 || horizon < 1) {
    throw ConfigError("planner needs scenarios >= 1 and horizon >= 1");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in (0, 1]");
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (!(c_safe > 0.0)) throw ConfigError("c_safe must be positive");
}

namespace {

void check_tail_args(std::span<const double> risks, double alpha) {
  if (risks.empty()) throw UsageError("CVaR of an empty sample");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw UsageError("alpha must be in (0, 1]");
  }
}

double plain_mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

}  // namespace

double empirical_cvar(std::span<const double> risks, double alpha,
                      TailRule rule) {
  check_tail_args(risks, alpha);
  const auto n = static_cast<double>(risks.size());
  if (alpha == 1.0) return plain_mean(risks);
  const double m = alpha * n;
  if (m <= 1.0) return *std::max_element(risks.begin(), risks.end());

  std::vector<double> sorted(risks.begin(), risks.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  if (rule == TailRule::kCeilCount) {
    const auto k = static_cast<std::size_t>(std::ceil(m));
    return std::accumulate(sorted.begin(), sorted.begin() + k, 0.0) /
           static_cast<double>(k);
  }
  const auto whole = static_cast<std::size_t>(std::floor(m));
  const double frac = m - static_cast<double>(whole);
  double sum = std::accumulate(sorted.begin(), sorted.begin() + whole, 0.0);
  if (frac > 0.0 && whole < sorted.size()) sum += frac * sorted[whole];
  return sum / m;
}

double cvar_via_threshold(std::span<const double> risks, double alpha) {
  check_tail_args(risks, alpha);
  std::vector<double> sorted(risks.begin(), risks.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  // suffix[i] = sum of sorted[i..n)
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + sorted[i];

  const double scale = 1.0 / (alpha * static_cast<double>(n));
  double best = std::numeric_limits<double>::infinity();
  std::size_t first_above = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double eta = sorted[i];
    while (first_above < n && sorted[first_above] <= eta) ++first_above;
    const double excess =
        suffix[first_above] - eta * static_cast<double>(n - first_above);
    best = std::min(best, eta + scale * excess);
  }
  return best;
}

double tail_term(std::span<const double> risks, const PlannerParams& params) {
  switch (params.objective) {
    case Objective::kCvar:
      return empirical_cvar(risks, params.alpha, params.tail_rule);
    case Objective::kMean:
      return plain_mean(risks);
    case Objective::kWorst:
      return *std::max_element(risks.begin(), risks.end());
  }
  return 0.0;
}

CommandScore assemble_score(const VelocityCommand& u,
                            std::vector<double> rewards,
                            std::vector<double> risks,
                            const PlannerParams& params) {
  CommandScore s;
  s.command = u;
  s.mean_reward = plain_mean(rewards);
  s.tail_risk = tail_term(risks, params);
  s.objective = s.mean_reward - params.lambda * s.tail_risk;
  s.rewards = std::move(rewards);
  s.risks = std::move(risks);
  return s;
}

CommandScore score_command(const VelocityCommand& u, const ScenarioBatch& batch,
                           const Pose& start, Vec2 goal, const StaticMap& map,
                           const PlannerParams& params, double robot_radius) {
  if (batch.scenarios.empty()) throw UsageError("empty scenario batch");
  std::vector<double> rewards, risks;
  rewards.reserve(batch.scenarios.size());
  risks.reserve(batch.scenarios.size());
  for (const Scenario& sc : batch.scenarios) {
    const RobotRollout r =
        rollout_command(u, start, sc, map, batch.dt, robot_radius);
    rewards.push_back(progress_reward(r, start, goal));
    risks.push_back(trajectory_risk(r, params.c_safe));
  }
  return assemble_score(u, std::move(rewards), std::move(risks), params);
}

bool prefer_on_tie(const VelocityCommand& a, const VelocityCommand& b,
                   double v_max) {
  const double wa = std::abs(a.omega), wb = std::abs(b.omega);
  if (wa != wb) return wa < wb;
  const double sa = std::abs(a.v - 0.5 * v_max);
  const double sb = std::abs(b.v - 0.5 * v_max);
  return sa < sb;
}

std::size_t best_score_index(std::span<const CommandScore> scores,
                             double v_max) {
  if (scores.empty()) throw UsageError("no scores to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const CommandScore& c = scores[i];
    const CommandScore& b = scores[best];
    if (c.objective > b.objective ||
        (c.objective == b.objective &&
         prefer_on_tie(c.command, b.command, v_max))) {
      best = i;
    }
  }
  return best;
}

Selection select_command(const InformationState& info,
                         const CommandLattice& lattice,
                         const ScenarioBatch& batch,
                         const PlannerParams& params, double robot_radius) {
  if (lattice.commands.empty()) throw UsageError("empty command lattice");
  Selection sel;
  sel.scores.reserve(lattice.commands.size());
  for (const VelocityCommand& u : lattice.commands) {
    sel.scores.push_back(score_command(u, batch, info.robot, info.goal,
                                       info.map, params, robot_radius));
  }
  sel.index = best_score_index(sel.scores, lattice.v_max);
  sel.nominal = sel.scores[sel.index].command;
  return sel;
}

}  // namespace rcsp
