#include "rcsp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "rcsp/errors.hpp"

namespace rcsp {
namespace {

std::vector<double> random_sample(Rng& rng, std::size_t n) {
  std::vector<double> xs(n);
  for (double& x : xs) x = rng.uniform();
  return xs;
}

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

TEST(EmpiricalCvar, Examples) {
  std::vector<double> a{0.1, 0.2, 0.3, 0.4};
  EXPECT_DOUBLE_EQ(empirical_cvar(a, 1.0), 0.25);
  std::vector<double> b{0.0, 1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(empirical_cvar(b, 0.25), 3.0);
  EXPECT_DOUBLE_EQ(empirical_cvar(b, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(empirical_cvar(b, 0.375), 8.0 / 3.0);
}

TEST(EmpiricalCvar, OrderIndependent) {
  std::vector<double> b{3.0, 0.0, 2.0, 1.0};
  EXPECT_DOUBLE_EQ(empirical_cvar(b, 0.375), 8.0 / 3.0);
}

TEST(EmpiricalCvar, CeilCountRule) {
  std::vector<double> b{0.0, 1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(empirical_cvar(b, 0.375, TailRule::kCeilCount), 2.5);
  EXPECT_DOUBLE_EQ(empirical_cvar(b, 0.5, TailRule::kCeilCount), 2.5);
  EXPECT_EQ(tail_rule_from_string(to_string(TailRule::kCeilCount)),
            TailRule::kCeilCount);
}

TEST(EmpiricalCvar, Errors) {
  std::vector<double> empty;
  EXPECT_THROW(empirical_cvar(empty, 0.5), UsageError);
  std::vector<double> one{1.0};
  EXPECT_THROW(empirical_cvar(one, 0.0), UsageError);
  EXPECT_THROW(empirical_cvar(one, 1.5), UsageError);
  EXPECT_THROW(cvar_via_threshold(empty, 0.5), UsageError);
}

TEST(ThresholdForm, Examples) {
  std::vector<double> b{0.0, 1.0, 2.0, 3.0};
  EXPECT_NEAR(cvar_via_threshold(b, 0.25), 3.0, 1e-12);
  EXPECT_NEAR(cvar_via_threshold(b, 0.375), 8.0 / 3.0, 1e-12);
  std::vector<double> c{0.7, 0.7, 0.7};
  for (double alpha : {0.1, 0.5, 1.0}) {
    EXPECT_NEAR(cvar_via_threshold(c, alpha), 0.7, 1e-15);
  }
}

TEST(ThresholdForm, AgreesWithSortedTail) {
  Rng rng(1, Stream::kValidation, {20});
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(80);
    std::vector<double> xs = random_sample(rng, n);
    for (double alpha : {0.05, 0.1, 0.25, 0.375, 0.5, 1.0}) {
      ASSERT_NEAR(empirical_cvar(xs, alpha), cvar_via_threshold(xs, alpha),
                  1e-9)
          << "n=" << n << " alpha=" << alpha;
    }
  }
}

TEST(EmpiricalCvar, AlphaLimits) {
  Rng rng(2, Stream::kValidation, {20});
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs = random_sample(rng, 1 + rng.uniform_index(50));
    const double n = static_cast<double>(xs.size());
    EXPECT_EQ(empirical_cvar(xs, 1.0), mean_of(xs));
    EXPECT_EQ(empirical_cvar(xs, 1.0 / n),
              *std::max_element(xs.begin(), xs.end()));
    EXPECT_EQ(empirical_cvar(xs, 0.5 / n),
              *std::max_element(xs.begin(), xs.end()));
  }
}

TEST(EmpiricalCvar, BetweenMeanAndMax) {
  Rng rng(3, Stream::kValidation, {20});
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> xs = random_sample(rng, 1 + rng.uniform_index(64));
    const double alpha = rng.uniform(1e-3, 1.0);
    const double c = empirical_cvar(xs, alpha);
    EXPECT_LE(mean_of(xs), c + 1e-12);
    EXPECT_LE(c, *std::max_element(xs.begin(), xs.end()) + 1e-12);
  }
}

TEST(EmpiricalCvar, MonotoneInEachSample) {
  Rng rng(4, Stream::kValidation, {20});
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> xs = random_sample(rng, 2 + rng.uniform_index(40));
    const double alpha = rng.uniform(0.01, 1.0);
    const double before = empirical_cvar(xs, alpha);
    xs[rng.uniform_index(xs.size())] += rng.uniform(0.0, 0.5);
    EXPECT_GE(empirical_cvar(xs, alpha), before - 1e-12);
  }
}

TEST(EmpiricalCvar, AffineEquivariance) {
  // Dyadic samples keep the arithmetic exact.
  Rng rng(5, Stream::kValidation, {20});
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(16);
    for (double& x : xs) x = static_cast<double>(rng.uniform_index(64)) / 8.0;
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = 4.0 * xs[i] + 0.5;
    for (double alpha : {0.125, 0.25, 0.5, 1.0}) {
      EXPECT_EQ(empirical_cvar(ys, alpha), 4.0 * empirical_cvar(xs, alpha) + 0.5);
    }
  }
}

TEST(Score, AssembledExactly) {
  PlannerParams p;
  p.alpha = 0.5;
  p.lambda = 2.0;
  CommandScore s = assemble_score({0.5, 0.0}, {1.0, 0.5, 0.0, 0.25},
                                  {0.0, 0.2, 1.0, 0.6}, p);
  EXPECT_DOUBLE_EQ(s.mean_reward, 0.4375);
  EXPECT_DOUBLE_EQ(s.tail_risk, 0.8);
  EXPECT_DOUBLE_EQ(s.objective, 0.4375 - 1.6);
  EXPECT_EQ(s.objective, s.mean_reward - p.lambda * s.tail_risk);
}

TEST(Score, LambdaZeroIgnoresRisk) {
  PlannerParams p;
  p.lambda = 0.0;
  CommandScore s = assemble_score({1.0, 0.0}, {0.3, 0.5}, {1.0, 1.0}, p);
  EXPECT_DOUBLE_EQ(s.objective, 0.4);
}

TEST(Score, ObjectiveVariants) {
  std::vector<double> g{0.1, 0.4, 0.9, 0.2};
  PlannerParams p;
  p.alpha = 0.25;
  p.objective = Objective::kCvar;
  EXPECT_DOUBLE_EQ(tail_term(g, p), 0.9);
  p.objective = Objective::kMean;
  EXPECT_DOUBLE_EQ(tail_term(g, p), 0.4);
  p.objective = Objective::kWorst;
  EXPECT_DOUBLE_EQ(tail_term(g, p), 0.9);
  std::vector<double> same{0.3, 0.3, 0.3};
  for (Objective o : {Objective::kCvar, Objective::kMean, Objective::kWorst}) {
    p.objective = o;
    EXPECT_DOUBLE_EQ(tail_term(same, p), 0.3);
    EXPECT_EQ(objective_from_string(to_string(o)), o);
  }
  EXPECT_THROW(objective_from_string("median"), ConfigError);
}

TEST(Params, Validate) {
  PlannerParams p;
  EXPECT_NO_THROW(p.validate());
  p.alpha = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = PlannerParams{};
  p.lambda = -1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = PlannerParams{};
  p.scenarios = 0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Lattice, DefaultGrid) {
  CommandLattice l = CommandLattice::make_default(1.0, 1.5);
  EXPECT_EQ(l.commands.size(), 25u);
  EXPECT_NO_THROW(l.validate());
  CommandLattice no_stop;
  no_stop.commands = {{1.0, 0.0}};
  EXPECT_THROW(no_stop.validate(), ConfigError);
  CommandLattice too_fast;
  too_fast.commands = {{0.0, 0.0}, {2.0, 0.0}};
  EXPECT_THROW(too_fast.validate(), ConfigError);
  EXPECT_THROW(CommandLattice{}.validate(), ConfigError);
}

TEST(Select, TieRule) {
  auto score = [](VelocityCommand u, double j) {
    CommandScore s;
    s.command = u;
    s.objective = j;
    return s;
  };
  std::vector<CommandScore> mirrored{score({0.5, -0.75}, 1.0),
                                     score({0.5, 0.75}, 1.0)};
  EXPECT_EQ(best_score_index(mirrored, 1.0), 0u);
  std::vector<CommandScore> speeds{score({1.0, 0.75}, 1.0),
                                   score({0.5, -0.75}, 1.0)};
  EXPECT_EQ(best_score_index(speeds, 1.0), 1u);
  std::vector<CommandScore> turn{score({0.5, 0.75}, 1.0),
                                 score({1.0, 0.0}, 1.0)};
  EXPECT_EQ(best_score_index(turn, 1.0), 1u);
  std::vector<CommandScore> higher{score({0.5, 0.0}, 1.0),
                                   score({1.0, 1.5}, 1.0 + 1e-12)};
  EXPECT_EQ(best_score_index(higher, 1.0), 1u);
}

TEST(Select, OpenSpaceMaxProgress) {
  InformationState info;
  info.family = default_family();
  info.posterior = Posterior::uniform(info.family.size());
  info.robot = Pose{0.0, 0.0, 0.0};
  info.goal = Vec2{8.0, 0.0};
  PlannerParams p;
  CommandLattice lattice = CommandLattice::make_default(1.0, 1.5);
  ScenarioBatch batch =
      sample_batch(info, p.scenarios, p.horizon, p.top_k, 0.1, 3, 0);
  for (double lambda : {0.0, 2.0, 50.0}) {
    p.lambda = lambda;
    Selection sel = select_command(info, lattice, batch, p, 0.25);
    std::size_t brute = 0;
    for (std::size_t i = 0; i < lattice.commands.size(); ++i) {
      CommandScore s = score_command(lattice.commands[i], batch, info.robot,
                                     info.goal, info.map, p, 0.25);
      EXPECT_EQ(s.objective, sel.scores[i].objective);
      if (s.objective > sel.scores[brute].objective) brute = i;
    }
    EXPECT_EQ(sel.index, brute);
    EXPECT_EQ(sel.nominal, (VelocityCommand{1.0, 0.0}));
  }
}

TEST(Select, SaturatedRiskReducesToReward) {
  PlannerParams p;
  p.lambda = 100.0;
  std::vector<CommandScore> scores;
  const std::vector<double> rewards{0.2, 0.9, 0.4};
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    scores.push_back(assemble_score({0.25 * static_cast<double>(i), 0.0},
                                    {rewards[i], rewards[i]}, {1.0, 1.0}, p));
  }
  EXPECT_EQ(best_score_index(scores, 1.0), 1u);
}

TEST(Select, RewardShiftInvariance) {
  Rng rng(6, Stream::kValidation, {20});
  PlannerParams p;
  p.alpha = 0.25;
  CommandLattice lattice = CommandLattice::make_default(1.0, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CommandScore> base, shifted;
    for (const VelocityCommand& u : lattice.commands) {
      std::vector<double> r(8), g(8);
      for (double& x : r) x = static_cast<double>(rng.uniform_index(8)) / 8.0;
      for (double& x : g) x = static_cast<double>(rng.uniform_index(4)) / 4.0;
      std::vector<double> r2(r);
      for (double& x : r2) x += 1.0;
      base.push_back(assemble_score(u, r, g, p));
      shifted.push_back(assemble_score(u, r2, g, p));
    }
    EXPECT_EQ(best_score_index(base, 1.0), best_score_index(shifted, 1.0));
  }
}

}  // namespace
}  // namespace rcsp
