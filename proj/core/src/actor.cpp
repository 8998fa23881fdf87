#include "aerocap/actor.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace aerocap {

namespace {
constexpr double kStrideLength = 1.4;  // m per gait cycle
}

std::string to_string(ActorKind kind) {
  switch (kind) {
    case ActorKind::kStatic:
      return "static";
    case ActorKind::kWalk:
      return "walk";
    case ActorKind::kSoccer:
      return "soccer";
  }
  return "walk";
}

ActorKind actor_kind_from_string(const std::string& s) {
  if (s == "static") return ActorKind::kStatic;
  if (s == "walk") return ActorKind::kWalk;
  if (s == "soccer") return ActorKind::kSoccer;
  throw InvalidArgument("unknown actor kind '" + s + "' (expected static, walk or soccer)");
}

ActorMotion::ActorMotion(const ActorSpec& spec, double duration, std::uint64_t seed) : spec_(spec) {
  if (spec_.waypoints.empty()) throw InvalidArgument("actor needs at least one waypoint");
  for (auto& w : spec_.waypoints) w.z() = 0.0;
  if (spec_.kind == ActorKind::kWalk) {
    if (!(spec_.speed > 0.0)) throw InvalidArgument("actor speed must be positive");
    auto pts = spec_.waypoints;
    if (spec_.loop && pts.size() > 1) pts.push_back(pts.front());
    spec_.waypoints = pts;
    cumulative_.push_back(0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) cumulative_.push_back(cumulative_.back() + (pts[i] - pts[i - 1]).norm());
  } else if (spec_.kind == ActorKind::kSoccer) {
    if (!(spec_.jump_interval > 0.0)) throw InvalidArgument("soccer jump_interval must be positive");
    std::mt19937_64 rng(seed ^ 0x50cce5ULL);
    std::uniform_real_distribution<double> angle(-kPi, kPi), speed(0.0, spec_.max_speed);
    const Vec3 home = spec_.waypoints.front();
    Vec3 p = home;
    soccer_points_.push_back(p);
    const auto jumps = static_cast<std::size_t>(std::ceil(duration / spec_.jump_interval)) + 2;
    for (std::size_t k = 0; k < jumps; ++k) {
      const double a = angle(rng), v = speed(rng);
      Vec3 next = p + spec_.jump_interval * v * Vec3(std::cos(a), std::sin(a), 0.0);
      for (int ax = 0; ax < 2; ++ax) {
        const double lo = home[ax] - spec_.arena_half_size, hi = home[ax] + spec_.arena_half_size;
        if (next[ax] > hi) next[ax] = 2 * hi - next[ax];
        if (next[ax] < lo) next[ax] = 2 * lo - next[ax];
      }
      soccer_points_.push_back(next);
      p = next;
    }
  }
}

ActorMotion::Sample ActorMotion::sample(double t) const {
  switch (spec_.kind) {
    case ActorKind::kStatic:
      return {spec_.waypoints.front(), spec_.heading, 0.0};
    case ActorKind::kSoccer: {
      const double u = std::max(0.0, t) / spec_.jump_interval;
      const auto k = std::min(static_cast<std::size_t>(u), soccer_points_.size() - 2);
      const double a = std::min(1.0, u - static_cast<double>(k));
      const Vec3 d = soccer_points_[k + 1] - soccer_points_[k];
      const Vec3 g = soccer_points_[k] + a * d;
      const double heading = d.head<2>().norm() > 1e-9 ? std::atan2(d.y(), d.x()) : 0.0;
      double dist = 0.0;
      for (std::size_t i = 0; i < k; ++i) dist += (soccer_points_[i + 1] - soccer_points_[i]).norm();
      return {g, heading, dist + a * d.norm()};
    }
    case ActorKind::kWalk:
      break;
  }
  const auto& pts = spec_.waypoints;
  if (pts.size() == 1 || cumulative_.back() <= 0.0) return {pts.front(), spec_.heading, 0.0};
  const double total = cumulative_.back();
  const double travelled = spec_.speed * std::max(0.0, t);
  double s = spec_.loop ? std::fmod(travelled, total) : std::min(travelled, total);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t i = std::min(static_cast<std::size_t>(it - cumulative_.begin()), pts.size() - 1);
  if (i == 0) i = 1;
  const double seg = cumulative_[i] - cumulative_[i - 1];
  const double a = seg > 0.0 ? std::clamp((s - cumulative_[i - 1]) / seg, 0.0, 1.0) : 0.0;
  const Vec3 d = pts[i] - pts[i - 1];
  Vec3 g = pts[i - 1] + a * d;
  const double heading = std::atan2(d.y(), d.x());
  if (spec_.sway_amplitude != 0.0 && spec_.sway_period > 0.0) {
    const Vec3 left(-std::sin(heading), std::cos(heading), 0.0);
    g += spec_.sway_amplitude * std::sin(kTwoPi * t / spec_.sway_period) * left;
  }
  return {g, heading, travelled};
}

Vec3 ActorMotion::position(double t) const {
  const Sample s = sample(t);
  return s.ground + Vec3(0, 0, kPelvisHeight);
}

double ActorMotion::heading(double t) const { return sample(t).heading; }

double ActorMotion::gait_phase(double t) const { return kTwoPi * sample(t).distance / kStrideLength; }

Skeleton ActorMotion::skeleton(double t) const {
  const Sample s = sample(t);
  return walking_pose(s.ground + Vec3(0, 0, kPelvisHeight), s.heading, kTwoPi * s.distance / kStrideLength);
}

}  // namespace aerocap
