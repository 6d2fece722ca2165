#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rcsp/geometry.hpp"
#include "rcsp/random.hpp"
#include "rcsp/world.hpp"

namespace rcsp {

enum class ConjectureKind { kStatic, kConstantVelocity, kYielding, kAggressive };

const char* to_string(ConjectureKind kind);
ConjectureKind conjecture_kind_from_string(const std::string& name);

/// One hypothesis about how nearby obstacles move over the short horizon.
struct Conjecture {
  ConjectureKind kind = ConjectureKind::kStatic;
  double speed_scale = 1.0;     // constant-velocity gamma
  double yield_distance = 1.5;  // yielding: slow down inside this range
  double decel = 0.2;           // yielding: velocity factor when slowed
  double pursuit_gain = 0.5;    // aggressive: blend toward the robot
  double sigma = 0.1;           // rollout process noise, m/s

  /// Obstacle motion depends on where the robot is.
  [[nodiscard]] bool reactive() const {
    return kind == ConjectureKind::kYielding ||
           kind == ConjectureKind::kAggressive;
  }
};

/// static; constant velocity at 0.5, 1.0, 1.5; yielding; aggressive.
std::vector<Conjecture> default_family();

/// Symmetric 2x2 matrix.
struct Mat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

/// Tracked state of one obstacle: Gaussian velocity estimate anchored at the
/// last observed position.
struct ObstacleTrack {
  Vec2 position;
  double radius = 0.0;
  Vec2 velocity;
  Mat2 covariance;
  int staleness = 0;     // steps since last seen
  int observations = 0;
};

using BeliefMap = std::map<int, ObstacleTrack>;

struct TrackerParams {
  double smoothing = 0.5;         // lambda_track in (0, 1]
  double obs_sigma = 0.02;        // position noise feeding the velocity variance
  double initial_variance = 1.0;  // (m/s)^2 at first sighting
  double stale_inflation = 0.05;  // (m/s)^2 added per unseen step
  double min_variance = 1e-4;
};

/// Exponential-smoothing velocity tracker (prediction-correction on the
/// velocity mean, variance shrunk on sightings and inflated while unseen).
BeliefMap track_obstacles(const BeliefMap& beliefs, const Observation& obs,
                          double dt, const TrackerParams& params = {});

/// Position of a tracked obstacle `dt` seconds ahead under a conjecture.
Vec2 predict_obstacle(const Conjecture& conj, const ObstacleTrack& track,
                      const Pose& robot, double dt);

/// Velocity an obstacle moving at `velocity` takes over the next step under
/// the conjecture. Shared by one-step prediction and scenario rollouts.
Vec2 conjectured_velocity(const Conjecture& conj, Vec2 position,
                          Vec2 velocity, const Pose& robot);

/// Sum over visible, previously tracked obstacles of the isotropic Gaussian
/// log density of (observed - predicted). Untracked obstacles contribute 0.
double log_likelihood(const Conjecture& conj, const BeliefMap& beliefs,
                      const Observation& obs, const Pose& robot, double dt,
                      double sigma_like);

/// exp(log_likelihood), floored at the smallest normal double so the
/// result stays strictly positive.
double likelihood(const Conjecture& conj, const BeliefMap& beliefs,
                  const Observation& obs, const Pose& robot, double dt,
                  double sigma_like);

/// Probability vector over the conjecture family.
struct Posterior {
  std::vector<double> weights;

  static Posterior uniform(std::size_t n);
  [[nodiscard]] std::size_t mode() const;
  [[nodiscard]] double entropy() const;
};

/// Tempered Bayes update q ∝ prior * l^(1/tau) computed in log space,
/// followed by the probability floor: entries below `floor` are pinned to it
/// and the remaining mass is shared by the others in proportion.
/// Throws NumericError on non-finite or non-positive likelihoods and
/// ConfigError on tau <= 0 or floor outside [0, 1/n).
Posterior update_posterior(const Posterior& prior,
                           std::span<const double> likelihoods, double tau,
                           double floor);

/// Same update taking log-likelihoods directly (no underflow for the large
/// negative values long observation vectors produce).
Posterior update_posterior_log(const Posterior& prior,
                               std::span<const double> log_likelihoods,
                               double tau, double floor);

struct SampledObstacle {
  int id = 0;
  Vec2 position;
  Vec2 velocity;
  double radius = 0.0;
};

/// Draws one full obstacle state: last observed positions and velocities
/// from each track's Gaussian. Obstacles are drawn in id order.
std::vector<SampledObstacle> sample_obstacle_state(const BeliefMap& beliefs,
                                                   Rng& rng);

/// What the planner knows at decision time.
struct InformationState {
  StaticMap map;
  std::vector<Conjecture> family;
  BeliefMap beliefs;
  Posterior posterior;
  Pose robot;
  Vec2 goal;
};

}  // namespace rcsp
