#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aerocap/geometry.hpp"
#include "aerocap/skeleton.hpp"

namespace aerocap {

enum class ActorKind { kStatic, kWalk, kSoccer };

std::string to_string(ActorKind kind);
ActorKind actor_kind_from_string(const std::string& s);

struct ActorSpec {
  ActorKind kind = ActorKind::kWalk;
  /// Ground-plane waypoints (z ignored). The static actor stands on the first.
  std::vector<Vec3> waypoints = {Vec3(0, 0, 0), Vec3(30, 0, 0), Vec3(30, 20, 0), Vec3(0, 20, 0)};
  double speed = 1.5;            // m/s
  bool loop = true;
  double sway_amplitude = 0.0;   // m, lateral
  double sway_period = 4.0;      // s
  double heading = 0.0;          // rad, static actor only
  // Soccer preset: piecewise-constant random velocities inside a square arena.
  double jump_interval = 2.0;    // s
  double max_speed = 3.0;        // m/s
  double arena_half_size = 15.0; // m
};

/// Deterministic ground-truth actor motion. `position` is the pelvis centre.
class ActorMotion {
 public:
  ActorMotion(const ActorSpec& spec, double duration, std::uint64_t seed);

  Vec3 position(double t) const;
  double heading(double t) const;
  double gait_phase(double t) const;
  Skeleton skeleton(double t) const;

 private:
  struct Sample {
    Vec3 ground;
    double heading;
    double distance;
  };
  Sample sample(double t) const;

  ActorSpec spec_;
  std::vector<double> cumulative_;   // walk: distance at each waypoint
  std::vector<Vec3> soccer_points_;  // soccer: positions at jump boundaries
};

}  // namespace aerocap
