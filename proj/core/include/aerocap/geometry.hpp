#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace aerocap {

/// World frame is right-handed, x-forward, y-left, z-up. Meters.
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Thrown when a precondition on an input is violated.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// Camera placement around the actor. theta is the azimuth (yaw about z),
/// phi the elevation above the actor's horizontal plane.
struct SphericalCoord {
  double rho = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Drone pose. `heading` is the yaw about z, `camera_tilt` is positive when the
/// gimbal looks below the horizon.
struct Pose {
  Vec3 position = Vec3::Zero();
  double heading = 0.0;
  double camera_tilt = 0.0;
};

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into [-pi, pi).
double wrap_angle(double a);

/// Signed shortest angular difference b - a in [-pi, pi).
double angle_diff(double a, double b);

/// actor_pos + rho * [cos(theta)cos(phi), sin(theta)cos(phi), sin(phi)].
Vec3 spherical_to_world(const Vec3& actor_pos, const SphericalCoord& s);

/// Inverse of spherical_to_world. Throws InvalidArgument("degenerate radius")
/// when p coincides with actor_pos.
SphericalCoord world_to_spherical(const Vec3& actor_pos, const Vec3& p);

/// Pose at `position` whose heading and gimbal tilt point at `target`.
Pose look_at(const Vec3& position, const Vec3& target);

bool all_finite(const Vec3& v);

}  // namespace aerocap
