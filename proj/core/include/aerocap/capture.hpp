#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aerocap/geometry.hpp"
#include "aerocap/occupancy.hpp"
#include "aerocap/skeleton.hpp"

namespace aerocap {

using Pixel = Eigen::Vector2d;
using Rng = std::mt19937_64;

struct CameraIntrinsics {
  double fx = 320.0;
  double fy = 320.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;

  void validate() const;
  bool inside(const Pixel& px) const {
    return px.x() >= 0.0 && px.y() >= 0.0 && px.x() < width && px.y() < height;
  }
};

/// World-to-camera rotation. Camera axes: x right, y down, z along the optical
/// axis given by the pose heading and gimbal tilt.
Eigen::Matrix3d camera_rotation(const Pose& pose);

/// K [R | -R c].
Eigen::Matrix<double, 3, 4> projection_matrix(const Pose& pose, const CameraIntrinsics& intr);

/// Pinhole projection; std::nullopt marks a point at or behind the camera.
std::optional<Pixel> project(const Pose& pose, const CameraIntrinsics& intr, const Vec3& p);

struct JointDetection {
  double u = 0.0;
  double v = 0.0;
  double confidence = 0.0;
  bool visible = false;
};

struct Detection2D {
  std::vector<JointDetection> joints;
};

/// Parametric stand-in for a 2D keypoint detector plus camera pose noise.
struct NoiseModel {
  double pixel_sigma = 2.0;           // px
  double pose_position_sigma = 0.0;   // m per axis
  double pose_rotation_sigma = 0.0;   // rad on heading and tilt
  double miss_base_rate = 0.02;
  double miss_tilt_gain = 0.15;       // per radian of camera tilt
  double swap_rate = 0.05;            // at 60 degrees of tilt, linear in tilt
  std::uint64_t rng_seed = 0;

  void validate() const;
  double miss_probability(double tilt) const;
  double swap_probability(double tilt) const;
};

struct DetectorParams {
  double occlusion_threshold = 0.5;
  int quadrature_samples = 32;
};

/// Projects every joint of `gt` and applies visibility, pixel noise, misses and
/// left/right swaps. Consumes a fixed number of draws from `rng` per call.
Detection2D simulate_detections(const Skeleton& gt, const Pose& pose, const CameraIntrinsics& intr,
                                const WorldModel& world, const NoiseModel& noise, Rng& rng,
                                const DetectorParams& params = {});

/// Pose with iid Gaussian offsets on position, heading and tilt. Always draws
/// five standard normals so streams stay aligned across noise levels.
Pose perturb_camera_pose(const Pose& pose, const NoiseModel& noise, Rng& rng);

/// Thrown by triangulate when all viewing rays are parallel.
class DegenerateBaseline : public std::runtime_error {
 public:
  DegenerateBaseline() : std::runtime_error("degenerate baseline") {}
};

struct Observation {
  Pose pose;
  CameraIntrinsics intrinsics;
  Pixel pixel;
};

/// Homogeneous DLT: two rows per view, solution is the right singular vector
/// of the smallest singular value.
Vec3 triangulate(std::span<const Observation> observations);

/// One camera's view of one frame, with the pose the reconstruction believes.
struct CameraFrame {
  int camera_id = 0;
  Pose pose;
  CameraIntrinsics intrinsics;
  Detection2D detection;
};

struct CaptureFrame {
  double timestamp = 0.0;
  std::vector<CameraFrame> cameras;
};

struct ReconstructionStats {
  std::size_t carried_joints = 0;
  std::size_t degenerate_joints = 0;
};

/// Triangulates every joint seen by at least two cameras. Other joints repeat
/// the previous frame's estimate (or the next available one at the start of
/// the sequence) and are flagged.
SkeletonSequence reconstruct_sequence(const std::vector<CaptureFrame>& frames, int joint_count = kJointCount,
                                      ReconstructionStats* stats = nullptr);

struct ReconError {
  double total = 0.0;                  // sum over frames of squared Frobenius distance
  std::vector<double> per_frame_mpjpe;  // m
  double mean_mpjpe = 0.0;
};

ReconError recon_error(const SkeletonSequence& est, const SkeletonSequence& gt);

/// Independent stream for (seed, frame, camera, purpose).
Rng make_stream(std::uint64_t seed, std::uint64_t frame, std::uint64_t camera, std::uint64_t purpose);

}  // namespace aerocap
