#include "aerocap/geometry.hpp"

#include <cmath>

namespace aerocap {

double wrap_angle(double a) {
  double w = std::fmod(a + kPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  w -= kPi;
  // fmod can land exactly on +pi after the shift for inputs just below -pi.
  if (w >= kPi) w -= kTwoPi;
  return w;
}

double angle_diff(double a, double b) { return wrap_angle(b - a); }

Vec3 spherical_to_world(const Vec3& actor_pos, const SphericalCoord& s) {
  const double cp = std::cos(s.phi);
  return actor_pos + s.rho * Vec3(std::cos(s.theta) * cp, std::sin(s.theta) * cp, std::sin(s.phi));
}

SphericalCoord world_to_spherical(const Vec3& actor_pos, const Vec3& p) {
  const Vec3 d = p - actor_pos;
  const double rho = d.norm();
  if (!(rho > 0.0)) throw InvalidArgument("degenerate radius");
  SphericalCoord s;
  s.rho = rho;
  s.theta = wrap_angle(std::atan2(d.y(), d.x()));
  s.phi = std::atan2(d.z(), std::hypot(d.x(), d.y()));
  return s;
}

Pose look_at(const Vec3& position, const Vec3& target) {
  const Vec3 d = target - position;
  Pose pose;
  pose.position = position;
  pose.heading = wrap_angle(std::atan2(d.y(), d.x()));
  pose.camera_tilt = std::atan2(-d.z(), std::hypot(d.x(), d.y()));
  return pose;
}

bool all_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace aerocap
