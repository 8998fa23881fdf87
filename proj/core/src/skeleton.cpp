#include "aerocap/skeleton.hpp"

#include <cmath>

namespace aerocap {

std::string_view joint_name(int joint) {
  static constexpr std::array<std::string_view, kJointCount> kNames = {
      "nose",       "left_eye",   "right_eye",  "left_ear",    "right_ear",   "left_shoulder",
      "right_shoulder", "left_elbow", "right_elbow", "left_wrist", "right_wrist", "left_hip",
      "right_hip",  "left_knee",  "right_knee", "left_ankle",  "right_ankle"};
  if (joint < 0 || joint >= kJointCount) throw InvalidArgument("joint index out of range");
  return kNames[joint];
}

const std::array<std::pair<int, int>, 8>& left_right_pairs() {
  static const std::array<std::pair<int, int>, 8> kPairs = {
      {{1, 2}, {3, 4}, {5, 6}, {7, 8}, {9, 10}, {11, 12}, {13, 14}, {15, 16}}};
  return kPairs;
}

const std::vector<std::pair<int, int>>& bones() {
  static const std::vector<std::pair<int, int>> kBones = {
      {5, 7}, {7, 9}, {6, 8}, {8, 10}, {11, 13}, {13, 15}, {12, 14}, {14, 16},
      {5, 6}, {11, 12}, {5, 11}, {6, 12}, {0, 1}, {0, 2}, {1, 3}, {2, 4}};
  return kBones;
}

std::vector<double> Skeleton::bone_lengths() const {
  std::vector<double> out;
  out.reserve(bones().size());
  for (const auto& [a, b] : bones()) out.push_back((joints.at(a) - joints.at(b)).norm());
  return out;
}

Skeleton walking_pose(const Vec3& pelvis, double heading, double gait_phase) {
  const Vec3 fwd(std::cos(heading), std::sin(heading), 0.0);
  const Vec3 left(-std::sin(heading), std::cos(heading), 0.0);
  const Vec3 up = Vec3::UnitZ();
  auto at = [&](double f, double l, double u) { return pelvis + f * fwd + l * left + u * up; };

  const double s = std::sin(gait_phase);
  Skeleton sk;
  auto& j = sk.joints;
  j[0] = at(0.10, 0.0, 0.70);
  j[1] = at(0.08, 0.035, 0.73);
  j[2] = at(0.08, -0.035, 0.73);
  j[3] = at(0.0, 0.08, 0.70);
  j[4] = at(0.0, -0.08, 0.70);
  j[5] = at(0.0, 0.19, 0.50);
  j[6] = at(0.0, -0.19, 0.50);
  j[11] = at(0.0, 0.10, 0.0);
  j[12] = at(0.0, -0.10, 0.0);

  // Arms swing against the legs on the same side.
  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? 1.0 : -1.0;
    const double arm = -0.35 * sign * s;
    const double leg = 0.40 * sign * s;
    const int shoulder = 5 + side, elbow = 7 + side, wrist = 9 + side;
    const int hip = 11 + side, knee = 13 + side, ankle = 15 + side;

    j[elbow] = j[shoulder] + 0.28 * (std::sin(arm) * fwd - std::cos(arm) * up) + 0.02 * sign * left;
    const double forearm = arm + 0.25;
    j[wrist] = j[elbow] + 0.26 * (std::sin(forearm) * fwd - std::cos(forearm) * up) + 0.01 * sign * left;

    j[knee] = j[hip] + 0.45 * (std::sin(leg) * fwd - std::cos(leg) * up);
    const double shin = leg - 0.35 * std::max(0.0, -sign * std::cos(gait_phase));
    j[ankle] = j[knee] + 0.43 * (std::sin(shin) * fwd - std::cos(shin) * up);
  }
  return sk;
}

}  // namespace aerocap
