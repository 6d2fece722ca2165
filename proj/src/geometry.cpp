#include "rcsp/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace rcsp {

double normalize_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::remainder(angle, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  return a;
}

VelocityCommand clamp_command(VelocityCommand cmd, double v_max,
                              double omega_max) {
  return {std::clamp(cmd.v, -v_max, v_max),
          std::clamp(cmd.omega, -omega_max, omega_max)};
}

Pose step_unicycle(const Pose& pose, const VelocityCommand& cmd, double dt) {
  const double dtheta = cmd.omega * dt;
  Pose out = pose;
  if (std::abs(cmd.omega) < kOmegaEpsilon) {
    out.x = pose.x + cmd.v * dt * std::cos(pose.heading);
    out.y = pose.y + cmd.v * dt * std::sin(pose.heading);
  } else {
    const double r = cmd.v / cmd.omega;
    const double th1 = pose.heading + dtheta;
    out.x = pose.x + r * (std::sin(th1) - std::sin(pose.heading));
    out.y = pose.y - r * (std::cos(th1) - std::cos(pose.heading));
  }
  out.heading = normalize_angle(pose.heading + dtheta);
  return out;
}

double point_segment_distance(Vec2 p, const WallSegment& wall) {
  const Vec2 ab = wall.b - wall.a;
  const double len2 = ab.dot(ab);
  double t = len2 > 0.0 ? (p - wall.a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, wall.a + t * ab);
}

double clearance(const Disc& robot, std::span<const Disc> obstacles,
                 std::span<const WallSegment> walls, double sentinel) {
  if (obstacles.empty() && walls.empty()) return sentinel;
  double best = std::numeric_limits<double>::infinity();
  for (const Disc& o : obstacles) {
    best = std::min(best, distance(robot.center, o.center) - robot.radius -
                              o.radius);
  }
  for (const WallSegment& w : walls) {
    best = std::min(best, point_segment_distance(robot.center, w) -
                              robot.radius);
  }
  return best;
}

double goal_distance(const Pose& pose, Vec2 goal) {
  return distance(pose.position(), goal);
}

}  // namespace rcsp
