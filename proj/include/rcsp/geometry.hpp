#pragma once

#include <cmath>
#include <span>

namespace rcsp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  [[nodiscard]] double norm() const { return std::hypot(x, y); }
  [[nodiscard]] double dot(Vec2 o) const { return x * o.x + y * o.y; }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Planar robot pose. Heading is kept in (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  [[nodiscard]] Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Differential-drive twist command (v in m/s, omega in rad/s).
struct VelocityCommand {
  double v = 0.0;
  double omega = 0.0;

  friend bool operator==(const VelocityCommand&,
                         const VelocityCommand&) = default;
};

/// Clamps a command into |v| <= v_max, |omega| <= omega_max.
VelocityCommand clamp_command(VelocityCommand cmd, double v_max,
                              double omega_max);

struct Disc {
  Vec2 center;
  double radius = 0.0;
};

struct WallSegment {
  Vec2 a;
  Vec2 b;
};

/// Below this turn rate the arc update degenerates to a straight line.
inline constexpr double kOmegaEpsilon = 1e-6;

/// Default clearance reported for scenes with nothing to collide with.
inline constexpr double kDefaultClearanceSentinel = 100.0;

/// Integrates a constant twist exactly over dt (circular arc, or a straight
/// segment when |omega| < kOmegaEpsilon).
Pose step_unicycle(const Pose& pose, const VelocityCommand& cmd, double dt);

double point_segment_distance(Vec2 p, const WallSegment& wall);

/// Signed clearance of the robot disc against obstacle discs and walls:
/// negative iff something overlaps. Returns `sentinel` for an empty scene.
double clearance(const Disc& robot, std::span<const Disc> obstacles,
                 std::span<const WallSegment> walls,
                 double sentinel = kDefaultClearanceSentinel);

double goal_distance(const Pose& pose, Vec2 goal);

}  // namespace rcsp
