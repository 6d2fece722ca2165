#include "rcsp/belief.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "rcsp/errors.hpp"

namespace rcsp {
namespace {

Conjecture make(ConjectureKind kind, double scale = 1.0) {
  Conjecture c;
  c.kind = kind;
  c.speed_scale = scale;
  return c;
}

ObstacleTrack track_at(Vec2 position, Vec2 velocity) {
  ObstacleTrack t;
  t.position = position;
  t.velocity = velocity;
  t.radius = 0.3;
  return t;
}

Observation observation_of(std::vector<ObservedObstacle> obstacles) {
  Observation o;
  o.obstacles = std::move(obstacles);
  return o;
}

TEST(Family, DefaultHasSixConjectures) {
  std::vector<Conjecture> f = default_family();
  ASSERT_EQ(f.size(), 6u);
  EXPECT_EQ(f[0].kind, ConjectureKind::kStatic);
  EXPECT_EQ(f[1].speed_scale, 0.5);
  EXPECT_EQ(f[2].speed_scale, 1.0);
  EXPECT_EQ(f[3].speed_scale, 1.5);
  EXPECT_EQ(f[4].kind, ConjectureKind::kYielding);
  EXPECT_EQ(f[4].yield_distance, 1.5);
  EXPECT_EQ(f[4].decel, 0.2);
  EXPECT_EQ(f[5].kind, ConjectureKind::kAggressive);
  EXPECT_EQ(f[5].pursuit_gain, 0.5);
  for (const Conjecture& c : f) {
    EXPECT_EQ(conjecture_kind_from_string(to_string(c.kind)), c.kind);
  }
  EXPECT_THROW(conjecture_kind_from_string("erratic"), ConfigError);
}

TEST(Predict, StaticKeepsLastPosition) {
  ObstacleTrack t = track_at({1.0, 2.0}, {3.0, -1.0});
  Vec2 p = predict_obstacle(make(ConjectureKind::kStatic), t, Pose{}, 0.1);
  EXPECT_EQ(p, (Vec2{1.0, 2.0}));
}

TEST(Predict, ConstantVelocity) {
  ObstacleTrack t = track_at({0.0, 0.0}, {1.0, 0.0});
  Vec2 p =
      predict_obstacle(make(ConjectureKind::kConstantVelocity), t, Pose{}, 0.1);
  EXPECT_NEAR(p.x, 0.1, 1e-15);
  EXPECT_EQ(p.y, 0.0);
  Vec2 fast = predict_obstacle(make(ConjectureKind::kConstantVelocity, 1.5), t,
                               Pose{}, 0.1);
  EXPECT_NEAR(fast.x, 0.15, 1e-15);
}

TEST(Predict, YieldingSlowsInsideRange) {
  Conjecture c = make(ConjectureKind::kYielding);
  ObstacleTrack t = track_at({0.0, 0.0}, {1.0, 0.0});
  Pose near{0.0, c.yield_distance - 1e-6, 0.0};
  Vec2 p = predict_obstacle(c, t, near, 0.1);
  EXPECT_NEAR(p.x, 0.02, 1e-15);
  EXPECT_EQ(p.y, 0.0);
  Pose far{0.0, c.yield_distance + 1e-6, 0.0};
  EXPECT_NEAR(predict_obstacle(c, t, far, 0.1).x, 0.1, 1e-15);
}

TEST(Predict, AggressiveBlendsTowardRobot) {
  Conjecture c = make(ConjectureKind::kAggressive);
  ObstacleTrack t = track_at({0.0, 0.0}, {1.0, 0.0});
  Pose robot{0.0, 4.0, 0.0};
  Vec2 p = predict_obstacle(c, t, robot, 0.1);
  EXPECT_NEAR(p.x, 0.05, 1e-15);
  EXPECT_NEAR(p.y, 0.05, 1e-15);
}

TEST(Likelihood, DensityAtZeroOffset) {
  BeliefMap beliefs{{1, track_at({0.0, 0.0}, {1.0, 0.0})}};
  Observation obs = observation_of({{1, {0.1, 0.0}, 0.3}});
  double l = likelihood(make(ConjectureKind::kConstantVelocity), beliefs, obs,
                        Pose{}, 0.1, 0.1);
  EXPECT_NEAR(l, 1.0 / (2.0 * std::numbers::pi * 0.01), 1e-9);
  EXPECT_NEAR(l, 15.9155, 1e-4);
}

TEST(Likelihood, MirrorSymmetric) {
  BeliefMap beliefs{{1, track_at({0.0, 0.0}, {0.0, 0.0})}};
  Conjecture c = make(ConjectureKind::kStatic);
  double left = likelihood(c, beliefs, observation_of({{1, {-0.1, 0.0}, 0.3}}),
                           Pose{}, 0.1, 0.1);
  double right = likelihood(c, beliefs, observation_of({{1, {0.1, 0.0}, 0.3}}),
                            Pose{}, 0.1, 0.1);
  EXPECT_EQ(left, right);
}

TEST(Likelihood, EmptyAndUntrackedGiveOne) {
  BeliefMap beliefs{{1, track_at({0.0, 0.0}, {0.0, 0.0})}};
  Conjecture c = make(ConjectureKind::kStatic);
  EXPECT_EQ(likelihood(c, beliefs, observation_of({}), Pose{}, 0.1, 0.1), 1.0);
  EXPECT_EQ(likelihood(c, beliefs, observation_of({{9, {5.0, 5.0}, 0.3}}),
                       Pose{}, 0.1, 0.1),
            1.0);
}

TEST(Likelihood, AlwaysPositive) {
  BeliefMap beliefs{{1, track_at({0.0, 0.0}, {0.0, 0.0})}};
  double l = likelihood(make(ConjectureKind::kStatic), beliefs,
                        observation_of({{1, {1e3, 1e3}, 0.3}}), Pose{}, 0.1,
                        0.01);
  EXPECT_GT(l, 0.0);
  EXPECT_THROW(likelihood(make(ConjectureKind::kStatic), beliefs,
                          observation_of({}), Pose{}, 0.1, 0.0),
               UsageError);
}

TEST(Likelihood, StaleTrackPredictsOverElapsedTime) {
  ObstacleTrack t = track_at({0.0, 0.0}, {1.0, 0.0});
  t.staleness = 2;
  BeliefMap beliefs{{1, t}};
  double l = likelihood(make(ConjectureKind::kConstantVelocity), beliefs,
                        observation_of({{1, {0.3, 0.0}, 0.3}}), Pose{}, 0.1,
                        0.1);
  EXPECT_NEAR(l, 1.0 / (2.0 * std::numbers::pi * 0.01), 1e-9);
}

TEST(Posterior, EqualEvidence) {
  std::vector<double> l{1.0, 1.0};
  Posterior q = update_posterior(Posterior::uniform(2), l, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(q.weights[0], 0.5);
  EXPECT_DOUBLE_EQ(q.weights[1], 0.5);
}

TEST(Posterior, BayesArithmetic) {
  std::vector<double> l{4.0, 1.0};
  Posterior q = update_posterior(Posterior::uniform(2), l, 1.0, 0.0);
  EXPECT_NEAR(q.weights[0], 0.8, 1e-15);
  EXPECT_NEAR(q.weights[1], 0.2, 1e-15);
}

TEST(Posterior, Tempered) {
  std::vector<double> l{4.0, 1.0};
  Posterior q = update_posterior(Posterior::uniform(2), l, 2.0, 0.0);
  EXPECT_NEAR(q.weights[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(q.weights[1], 1.0 / 3.0, 1e-15);
}

TEST(Posterior, FloorPinsExactly) {
  std::vector<double> l{1e6, 1e-6};
  Posterior q = update_posterior(Posterior::uniform(2), l, 1.0, 0.02);
  EXPECT_EQ(q.weights[1], 0.02);
  EXPECT_NEAR(q.weights[0], 0.98, 1e-15);
}

TEST(Posterior, FloorHoldsAfterRescale) {
  // One pass would push the third entry back under the floor.
  Posterior prior{{0.94, 0.051, 0.009}};
  std::vector<double> l{1.0, 1.0, 1.0};
  Posterior q = update_posterior(prior, l, 1.0, 0.05);
  double sum = 0.0;
  for (double w : q.weights) {
    EXPECT_GE(w, 0.05);
    sum += w;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Posterior, EntriesNeverReachZero) {
  Posterior q = Posterior::uniform(6);
  std::vector<double> l{1.0, 1e-300, 1e-300, 1e-300, 1e-300, 1e-300};
  for (int i = 0; i < 500; ++i) {
    q = update_posterior(q, l, 1.0, 0.01);
    for (double w : q.weights) ASSERT_GT(w, 0.0);
  }
  for (std::size_t i = 1; i < 6; ++i) EXPECT_EQ(q.weights[i], 0.01);
}

TEST(Posterior, UnrolledUpdateIdentity) {
  Rng rng(42, Stream::kValidation, {1});
  const std::size_t n = 6;
  const int steps = 50;
  Posterior prior{{0.1, 0.3, 0.2, 0.15, 0.05, 0.2}};
  Posterior q = prior;
  std::vector<double> cumulative(n, 0.0);
  for (int t = 0; t < steps; ++t) {
    std::vector<double> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      l[i] = rng.uniform(0.2, 3.0);
      cumulative[i] += std::log(l[i]);
    }
    q = update_posterior(q, l, 1.0, 0.0);
  }
  std::vector<double> batch(n);
  double peak = -1e300;
  for (std::size_t i = 0; i < n; ++i) {
    batch[i] = std::log(prior.weights[i]) + cumulative[i];
    peak = std::max(peak, batch[i]);
  }
  double z = 0.0;
  for (double& b : batch) {
    b = std::exp(b - peak);
    z += b;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = batch[i] / z;
    EXPECT_LE(std::abs(q.weights[i] - expected), 1e-10 * expected) << i;
  }
}

TEST(Posterior, TemperingLimitKeepsPrior) {
  Posterior prior{{0.1, 0.2, 0.7}};
  std::vector<double> l{2.0, 0.5, 1.0};
  Posterior q = update_posterior(prior, l, 1e6, 0.0);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(q.weights[i], prior.weights[i], 1e-6);
  }
}

TEST(Posterior, LogFormMatchesLikelihoodForm) {
  Posterior prior{{0.25, 0.25, 0.5}};
  std::vector<double> l{2.0, 0.5, 1.5};
  std::vector<double> ll{std::log(2.0), std::log(0.5), std::log(1.5)};
  Posterior a = update_posterior(prior, l, 1.5, 0.01);
  Posterior b = update_posterior_log(prior, ll, 1.5, 0.01);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.weights[i], b.weights[i]);
}

TEST(Posterior, LargeNegativeLogLikelihoods) {
  std::vector<double> ll{-5000.0, -5001.0};
  Posterior q = update_posterior_log(Posterior::uniform(2), ll, 1.0, 0.0);
  EXPECT_NEAR(q.weights[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-12);
}

TEST(Posterior, Errors) {
  Posterior p = Posterior::uniform(2);
  std::vector<double> bad{std::nan(""), 1.0};
  EXPECT_THROW(update_posterior(p, bad, 1.0, 0.0), NumericError);
  std::vector<double> inf{INFINITY, 1.0};
  EXPECT_THROW(update_posterior(p, inf, 1.0, 0.0), NumericError);
  std::vector<double> zero{0.0, 1.0};
  EXPECT_THROW(update_posterior(p, zero, 1.0, 0.0), NumericError);
  std::vector<double> ok{1.0, 1.0};
  EXPECT_THROW(update_posterior(p, ok, 0.0, 0.0), ConfigError);
  EXPECT_THROW(update_posterior(p, ok, 1.0, 0.5), ConfigError);
  std::vector<double> short_l{1.0};
  EXPECT_THROW(update_posterior(p, short_l, 1.0, 0.0), UsageError);
}

TEST(Posterior, EntropyAndMode) {
  Posterior u = Posterior::uniform(4);
  EXPECT_NEAR(u.entropy(), std::log(4.0), 1e-15);
  Posterior q{{0.1, 0.6, 0.3}};
  EXPECT_EQ(q.mode(), 1u);
}

TEST(Tracker, FirstSighting) {
  BeliefMap b = track_obstacles({}, observation_of({{4, {1.0, 2.0}, 0.3}}),
                                0.1);
  ASSERT_EQ(b.count(4), 1u);
  const ObstacleTrack& t = b.at(4);
  EXPECT_EQ(t.velocity, (Vec2{0.0, 0.0}));
  EXPECT_EQ(t.position, (Vec2{1.0, 2.0}));
  EXPECT_GE(t.covariance.xx, 1.0);
  EXPECT_GE(t.covariance.yy, 1.0);
  EXPECT_EQ(t.staleness, 0);
}

TEST(Tracker, StationaryWithFullSmoothing) {
  TrackerParams p;
  p.smoothing = 1.0;
  BeliefMap b;
  for (int i = 0; i < 2; ++i) {
    b = track_obstacles(b, observation_of({{0, {1.0, 1.0}, 0.3}}), 0.1, p);
  }
  EXPECT_EQ(b.at(0).velocity, (Vec2{0.0, 0.0}));
}

TEST(Tracker, GeometricConvergence) {
  TrackerParams p;
  p.smoothing = 0.5;
  BeliefMap b;
  for (int k = 0; k <= 3; ++k) {
    b = track_obstacles(b, observation_of({{0, {0.1 * k, 0.0}, 0.3}}), 0.1, p);
  }
  EXPECT_NEAR(b.at(0).velocity.x, 0.875, 1e-12);
  EXPECT_EQ(b.at(0).velocity.y, 0.0);
}

TEST(Tracker, UnseenInflatesAndResumes) {
  TrackerParams p;
  BeliefMap b;
  b = track_obstacles(b, observation_of({{0, {0.0, 0.0}, 0.3}}), 0.1, p);
  b = track_obstacles(b, observation_of({{0, {0.1, 0.0}, 0.3}}), 0.1, p);
  const double var = b.at(0).covariance.xx;
  BeliefMap unseen = track_obstacles(b, observation_of({}), 0.1, p);
  EXPECT_EQ(unseen.at(0).staleness, 1);
  EXPECT_NEAR(unseen.at(0).covariance.xx, var + p.stale_inflation, 1e-15);
  // Finite difference spans the two elapsed steps.
  BeliefMap resumed =
      track_obstacles(unseen, observation_of({{0, {0.3, 0.0}, 0.3}}), 0.1, p);
  EXPECT_EQ(resumed.at(0).staleness, 0);
  const double v_before = b.at(0).velocity.x;
  EXPECT_NEAR(resumed.at(0).velocity.x, 0.5 * v_before + 0.5 * 1.0, 1e-12);
}

TEST(Tracker, CovarianceSymmetricPsd) {
  Rng rng(3, Stream::kValidation, {7});
  BeliefMap b;
  for (int i = 0; i < 200; ++i) {
    Observation obs;
    if (rng.uniform() < 0.8) {
      obs.obstacles.push_back({0, {rng.uniform(-1, 1), rng.uniform(-1, 1)}, 0.3});
    }
    b = track_obstacles(b, obs, 0.1);
    if (b.empty()) continue;
    const Mat2& c = b.at(0).covariance;
    EXPECT_GE(c.xx, 0.0);
    EXPECT_GE(c.yy, 0.0);
    EXPECT_GE(c.xx * c.yy - c.xy * c.xy, 0.0);
    EXPECT_GE(b.at(0).staleness, 0);
  }
  EXPECT_THROW(track_obstacles(b, Observation{}, 0.0), UsageError);
}

TEST(Sample, ZeroCovarianceReturnsMean) {
  ObstacleTrack t = track_at({1.0, 1.0}, {0.4, -0.2});
  BeliefMap b{{2, t}};
  Rng rng(1, Stream::kObstacleState, {0});
  std::vector<SampledObstacle> s = sample_obstacle_state(b, rng);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].velocity, t.velocity);
  EXPECT_EQ(s[0].position, t.position);
  EXPECT_EQ(s[0].id, 2);
}

TEST(Sample, IdentityCovarianceRegression) {
  ObstacleTrack t = track_at({0.0, 0.0}, {0.0, 0.0});
  t.covariance = {1.0, 0.0, 1.0};
  BeliefMap b{{0, t}};
  Rng a(123, Stream::kObstacleState, {0});
  Rng c(123, Stream::kObstacleState, {0});
  std::vector<SampledObstacle> s1 = sample_obstacle_state(b, a);
  std::vector<SampledObstacle> s2 = sample_obstacle_state(b, c);
  EXPECT_EQ(s1[0].velocity, s2[0].velocity);
  EXPECT_DOUBLE_EQ(s1[0].velocity.x, -0.55369836724517307);
  EXPECT_DOUBLE_EQ(s1[0].velocity.y, -0.31855180204774081);
}

TEST(Sample, MonteCarloCovariance) {
  ObstacleTrack t = track_at({0.0, 0.0}, {0.5, 0.0});
  t.covariance = {0.04, 0.0, 0.04};
  BeliefMap b{{0, t}};
  Rng rng(9, Stream::kObstacleState, {0});
  const int n = 10000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    Vec2 v = sample_obstacle_state(b, rng)[0].velocity;
    sx += v.x;
    sy += v.y;
    sxx += v.x * v.x;
    syy += v.y * v.y;
    sxy += v.x * v.y;
  }
  const double mx = sx / n, my = sy / n;
  EXPECT_NEAR(sxx / n - mx * mx, 0.04, 0.004);
  EXPECT_NEAR(syy / n - my * my, 0.04, 0.004);
  EXPECT_NEAR(sxy / n - mx * my, 0.0, 0.004);
  EXPECT_NEAR(mx, 0.5, 0.01);
}

TEST(Sample, CorrelatedCovariance) {
  ObstacleTrack t = track_at({0.0, 0.0}, {0.0, 0.0});
  t.covariance = {0.04, 0.03, 0.09};
  BeliefMap b{{0, t}};
  Rng rng(10, Stream::kObstacleState, {0});
  const int n = 20000;
  double sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    Vec2 v = sample_obstacle_state(b, rng)[0].velocity;
    sxy += v.x * v.y;
    syy += v.y * v.y;
  }
  EXPECT_NEAR(sxy / n, 0.03, 0.003);
  EXPECT_NEAR(syy / n, 0.09, 0.009);
}

// Observations come from the generating conjecture applied to a fixed
// velocity belief; the robot wanders around the obstacle so the reactive
// kinds are exercised.
TEST(Posterior, KlSelectionRecoversGenerator) {
  const std::vector<Conjecture> family = default_family();
  const double dt = 0.1;
  const double obs_sigma = 0.02;
  const double sigma_like = 0.04;
  int recovered = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t truth = static_cast<std::size_t>(trial) % family.size();
    Rng rng(static_cast<std::uint64_t>(trial), Stream::kValidation, {11});
    const double heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
    ObstacleTrack track =
        track_at({0.0, 0.0}, {std::cos(heading), std::sin(heading)});
    Posterior q = Posterior::uniform(family.size());
    for (int step = 0; step < 200; ++step) {
      const double r = rng.uniform(0.5, 3.0);
      const double a = rng.uniform(-std::numbers::pi, std::numbers::pi);
      Pose robot{track.position.x + r * std::cos(a),
                 track.position.y + r * std::sin(a), 0.0};
      Vec2 mean = predict_obstacle(family[truth], track, robot, dt);
      Observation obs = observation_of(
          {{0,
            {mean.x + obs_sigma * rng.normal(),
             mean.y + obs_sigma * rng.normal()},
            0.3}});
      BeliefMap beliefs{{0, track}};
      std::vector<double> ll(family.size());
      for (std::size_t k = 0; k < family.size(); ++k) {
        ll[k] = log_likelihood(family[k], beliefs, obs, robot, dt, sigma_like);
      }
      q = update_posterior_log(q, ll, 1.0, 0.01);
      track.position = obs.obstacles[0].position;
    }
    if (q.mode() == truth) ++recovered;
  }
  EXPECT_GE(recovered, 95);
}

}  // namespace
}  // namespace rcsp
