#include "rcsp/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rcsp/errors.hpp"

namespace rcsp {

const char* to_string(ConjectureKind kind) {
  switch (kind) {
    case ConjectureKind::kStatic:
      return "static";
    case ConjectureKind::kConstantVelocity:
      return "constant-velocity";
    case ConjectureKind::kYielding:
      return "yielding";
    case ConjectureKind::kAggressive:
      return "aggressive";
  }
  return "unknown";
}

ConjectureKind conjecture_kind_from_string(const std::string& name) {
  if (name == "static") return ConjectureKind::kStatic;
  if (name == "constant-velocity") return ConjectureKind::kConstantVelocity;
  if (name == "yielding") return ConjectureKind::kYielding;
  if (name == "aggressive") return ConjectureKind::kAggressive;
  throw ConfigError("unknown conjecture kind '" + name + "'");
}

std::vector<Conjecture> default_family() {
  std::vector<Conjecture> family;
  Conjecture c;
  c.kind = ConjectureKind::kStatic;
  c.sigma = 0.05;
  family.push_back(c);
  for (double gamma : {0.5, 1.0, 1.5}) {
    c = Conjecture{};
    c.kind = ConjectureKind::kConstantVelocity;
    c.speed_scale = gamma;
    family.push_back(c);
  }
  c = Conjecture{};
  c.kind = ConjectureKind::kYielding;
  c.yield_distance = 1.5;
  c.decel = 0.2;
  family.push_back(c);
  c = Conjecture{};
  c.kind = ConjectureKind::kAggressive;
  c.pursuit_gain = 0.5;
  family.push_back(c);
  return family;
}

BeliefMap track_obstacles(const BeliefMap& beliefs, const Observation& obs,
                          double dt, const TrackerParams& params) {
  if (!(dt > 0.0)) throw UsageError("track_obstacles requires dt > 0");
  const double lambda = params.smoothing;
  BeliefMap out = beliefs;
  for (auto& [id, track] : out) {
    ++track.staleness;
  }
  for (const ObservedObstacle& o : obs.obstacles) {
    auto it = out.find(o.id);
    if (it == out.end()) {
      ObstacleTrack track;
      track.position = o.position;
      track.radius = o.radius;
      track.covariance = {params.initial_variance, 0.0,
                          params.initial_variance};
      track.observations = 1;
      out.emplace(o.id, track);
      continue;
    }
    ObstacleTrack& track = it->second;
    // `staleness` was bumped above, so it now counts the elapsed steps.
    const double elapsed = track.staleness * dt;
    const Vec2 fd = (1.0 / elapsed) * (o.position - track.position);
    track.velocity = (1.0 - lambda) * track.velocity + lambda * fd;
    const double fd_var = std::max(
        2.0 * params.obs_sigma * params.obs_sigma / (elapsed * elapsed),
        params.min_variance);
    const double inflate = params.stale_inflation * (track.staleness - 1);
    track.covariance.xx =
        (1.0 - lambda) * (track.covariance.xx + inflate) + lambda * fd_var;
    track.covariance.xy = (1.0 - lambda) * track.covariance.xy;
    track.covariance.yy =
        (1.0 - lambda) * (track.covariance.yy + inflate) + lambda * fd_var;
    track.position = o.position;
    track.radius = o.radius;
    track.staleness = 0;
    ++track.observations;
  }
  for (auto& [id, track] : out) {
    if (track.staleness > 0) {
      track.covariance.xx += params.stale_inflation;
      track.covariance.yy += params.stale_inflation;
    }
  }
  return out;
}

Vec2 conjectured_velocity(const Conjecture& conj, Vec2 position,
                          Vec2 velocity, const Pose& robot) {
  switch (conj.kind) {
    case ConjectureKind::kStatic:
      return {};
    case ConjectureKind::kConstantVelocity:
      return conj.speed_scale * velocity;
    case ConjectureKind::kYielding:
      if (distance(robot.position(), position) < conj.yield_distance) {
        return conj.decel * velocity;
      }
      return velocity;
    case ConjectureKind::kAggressive: {
      const Vec2 to_robot = robot.position() - position;
      const double len = to_robot.norm();
      if (len <= 0.0) return velocity;
      return (1.0 - conj.pursuit_gain) * velocity +
             (conj.pursuit_gain / len) * to_robot;
    }
  }
  return velocity;
}

Vec2 predict_obstacle(const Conjecture& conj, const ObstacleTrack& track,
                      const Pose& robot, double dt) {
  return track.position +
         dt * conjectured_velocity(conj, track.position, track.velocity, robot);
}

double log_likelihood(const Conjecture& conj, const BeliefMap& beliefs,
                      const Observation& obs, const Pose& robot, double dt,
                      double sigma_like) {
  if (!(sigma_like > 0.0)) throw UsageError("sigma_like must be positive");
  const double var = sigma_like * sigma_like;
  const double log_norm = -std::log(2.0 * std::numbers::pi * var);
  double total = 0.0;
  for (const ObservedObstacle& o : obs.obstacles) {
    auto it = beliefs.find(o.id);
    if (it == beliefs.end()) continue;
    const ObstacleTrack& track = it->second;
    const double elapsed = (track.staleness + 1) * dt;
    const Vec2 predicted = predict_obstacle(conj, track, robot, elapsed);
    const Vec2 r = o.position - predicted;
    total += log_norm - r.dot(r) / (2.0 * var);
  }
  return total;
}

double likelihood(const Conjecture& conj, const BeliefMap& beliefs,
                  const Observation& obs, const Pose& robot, double dt,
                  double sigma_like) {
  const double ll = log_likelihood(conj, beliefs, obs, robot, dt, sigma_like);
  return std::max(std::exp(ll), std::numeric_limits<double>::min());
}

Posterior Posterior::uniform(std::size_t n) {
  return Posterior{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

std::size_t Posterior::mode() const {
  return static_cast<std::size_t>(
      std::max_element(weights.begin(), weights.end()) - weights.begin());
}

double Posterior::entropy() const {
  double h = 0.0;
  for (double w : weights) {
    if (w > 0.0) h -= w * std::log(w);
  }
  return h;
}

Posterior update_posterior_log(const Posterior& prior,
                               std::span<const double> log_likelihoods,
                               double tau, double floor) {
  const std::size_t n = prior.weights.size();
  if (n == 0 || log_likelihoods.size() != n) {
    throw UsageError("posterior and likelihood sizes differ");
  }
  if (!(tau > 0.0)) throw ConfigError("temperature must be positive");
  if (floor < 0.0 || floor * static_cast<double>(n) >= 1.0) {
    throw ConfigError("probability floor must lie in [0, 1/|family|)");
  }
  std::vector<double> logw(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(log_likelihoods[i])) {
      throw NumericError("non-finite likelihood");
    }
    logw[i] = std::log(prior.weights[i]) + log_likelihoods[i] / tau;
  }
  const double peak = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(logw[i] - peak);
    sum += w[i];
  }
  for (double& x : w) x /= sum;

  if (floor > 0.0) {
    // Pin entries under the floor, rescale the rest into the remaining mass.
    // Rescaling can push another entry under the floor, so repeat until
    // stable; each pass pins at least one more entry.
    std::vector<bool> pinned(n, false);
    for (std::size_t pass = 0; pass < n; ++pass) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (!pinned[i] && w[i] < floor) {
          pinned[i] = true;
          changed = true;
        }
      }
      if (!changed) break;
      double free_mass = 0.0;
      std::size_t n_pinned = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (pinned[i]) {
          ++n_pinned;
        } else {
          free_mass += w[i];
        }
      }
      const double target = 1.0 - floor * static_cast<double>(n_pinned);
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = pinned[i] ? floor : w[i] * (target / free_mass);
      }
    }
  }
  return Posterior{std::move(w)};
}

Posterior update_posterior(const Posterior& prior,
                           std::span<const double> likelihoods, double tau,
                           double floor) {
  std::vector<double> logs(likelihoods.size());
  for (std::size_t i = 0; i < likelihoods.size(); ++i) {
    if (!std::isfinite(likelihoods[i])) {
      throw NumericError("non-finite likelihood");
    }
    if (!(likelihoods[i] > 0.0)) {
      throw NumericError("likelihoods must be positive");
    }
    logs[i] = std::log(likelihoods[i]);
  }
  return update_posterior_log(prior, logs, tau, floor);
}

std::vector<SampledObstacle> sample_obstacle_state(const BeliefMap& beliefs,
                                                   Rng& rng) {
  std::vector<SampledObstacle> out;
  out.reserve(beliefs.size());
  for (const auto& [id, track] : beliefs) {
    const Mat2& c = track.covariance;
    const double l11 = std::sqrt(std::max(c.xx, 0.0));
    const double l21 = l11 > 0.0 ? c.xy / l11 : 0.0;
    const double l22 = std::sqrt(std::max(c.yy - l21 * l21, 0.0));
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    SampledObstacle s;
    s.id = id;
    s.position = track.position;
    s.radius = track.radius;
    s.velocity = {track.velocity.x + l11 * z1,
                  track.velocity.y + l21 * z1 + l22 * z2};
    out.push_back(s);
  }
  return out;
}

}  // namespace rcsp
