#pragma once

#include <array>
#include <string_view>
#include <utility>
#include <vector>

#include "aerocap/geometry.hpp"

namespace aerocap {

/// 17-joint body model in COCO keypoint order:
///  0 nose, 1/2 left/right eye, 3/4 ears, 5/6 shoulders, 7/8 elbows,
///  9/10 wrists, 11/12 hips, 13/14 knees, 15/16 ankles.
inline constexpr int kJointCount = 17;

std::string_view joint_name(int joint);

/// Left/right joint index pairs.
const std::array<std::pair<int, int>, 8>& left_right_pairs();

/// Parent/child joint pairs forming the limbs.
const std::vector<std::pair<int, int>>& bones();

struct Skeleton {
  std::vector<Vec3> joints;

  Skeleton() : joints(kJointCount, Vec3::Zero()) {}
  explicit Skeleton(std::vector<Vec3> j) : joints(std::move(j)) {}

  std::size_t size() const { return joints.size(); }
  std::vector<double> bone_lengths() const;
};

struct SkeletonSequence {
  std::vector<double> timestamps;
  std::vector<Skeleton> frames;
  /// carried[f][j] is set when joint j of frame f could not be triangulated and
  /// was filled from a neighbouring frame.
  std::vector<std::vector<bool>> carried;

  std::size_t size() const { return frames.size(); }
};

/// Pelvis height of the walking model above the ground plane.
inline constexpr double kPelvisHeight = 0.95;

/// Articulated walking pose. `pelvis` is the hip centre, `heading` the facing
/// yaw and `gait_phase` the stride phase in radians.
Skeleton walking_pose(const Vec3& pelvis, double heading, double gait_phase);

}  // namespace aerocap
