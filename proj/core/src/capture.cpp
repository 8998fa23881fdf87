#include "aerocap/capture.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "aerocap/costs.hpp"

namespace aerocap {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Vec3 ray_direction(const Observation& obs) {
  const CameraIntrinsics& k = obs.intrinsics;
  const Vec3 cam((obs.pixel.x() - k.cx) / k.fx, (obs.pixel.y() - k.cy) / k.fy, 1.0);
  return (camera_rotation(obs.pose).transpose() * cam).normalized();
}

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) throw InvalidArgument("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw InvalidArgument("intrinsics: image size must be positive");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height))
    throw InvalidArgument("intrinsics: principal point must lie inside the image");
}

void NoiseModel::validate() const {
  if (pixel_sigma < 0.0 || pose_position_sigma < 0.0 || pose_rotation_sigma < 0.0)
    throw InvalidArgument("noise: sigmas must be non-negative");
  for (double r : {miss_base_rate, miss_tilt_gain, swap_rate})
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("noise: rates must lie in [0, 1]");
}

double NoiseModel::miss_probability(double tilt) const {
  return std::clamp(miss_base_rate + miss_tilt_gain * std::abs(tilt), 0.0, 1.0);
}

double NoiseModel::swap_probability(double tilt) const {
  return std::clamp(swap_rate * std::abs(tilt) / (kPi / 3.0), 0.0, 1.0);
}

Eigen::Matrix3d camera_rotation(const Pose& pose) {
  const double ch = std::cos(pose.heading), sh = std::sin(pose.heading);
  const double ct = std::cos(pose.camera_tilt), st = std::sin(pose.camera_tilt);
  const Vec3 forward(ch * ct, sh * ct, -st);
  const Vec3 right(sh, -ch, 0.0);
  const Vec3 down = forward.cross(right);
  Eigen::Matrix3d r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  return r;
}

Eigen::Matrix<double, 3, 4> projection_matrix(const Pose& pose, const CameraIntrinsics& intr) {
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = intr.fx;
  k(1, 1) = intr.fy;
  k(0, 2) = intr.cx;
  k(1, 2) = intr.cy;
  const Eigen::Matrix3d r = camera_rotation(pose);
  Eigen::Matrix<double, 3, 4> rt;
  rt.block<3, 3>(0, 0) = r;
  rt.col(3) = -r * pose.position;
  return k * rt;
}

std::optional<Pixel> project(const Pose& pose, const CameraIntrinsics& intr, const Vec3& p) {
  const Vec3 c = camera_rotation(pose) * (p - pose.position);
  if (!(c.z() > 0.0)) return std::nullopt;
  return Pixel(intr.fx * c.x() / c.z() + intr.cx, intr.fy * c.y() / c.z() + intr.cy);
}

Detection2D simulate_detections(const Skeleton& gt, const Pose& pose, const CameraIntrinsics& intr,
                                const WorldModel& world, const NoiseModel& noise, Rng& rng,
                                const DetectorParams& params) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double p_miss = noise.miss_probability(pose.camera_tilt);
  const double p_swap = noise.swap_probability(pose.camera_tilt);

  Detection2D det;
  det.joints.resize(gt.size());
  for (std::size_t j = 0; j < gt.size(); ++j) {
    const double nu = normal(rng);
    const double nv = normal(rng);
    const double draw = uniform(rng);

    JointDetection& out = det.joints[j];
    const auto px = project(pose, intr, gt.joints[j]);
    if (!px || !intr.inside(*px)) continue;
    if (segment_occlusion(world.grid, pose.position, gt.joints[j], params.quadrature_samples) >
        params.occlusion_threshold)
      continue;
    const Pixel noisy = *px + noise.pixel_sigma * Pixel(nu, nv);
    if (!intr.inside(noisy) || draw < p_miss) continue;
    out.u = noisy.x();
    out.v = noisy.y();
    out.confidence = 1.0 - p_miss;
    out.visible = true;
  }
  for (const auto& [l, r] : left_right_pairs()) {
    const double draw = uniform(rng);
    if (static_cast<std::size_t>(std::max(l, r)) >= det.joints.size()) continue;
    if (draw < p_swap) std::swap(det.joints[l], det.joints[r]);
  }
  return det;
}

Pose perturb_camera_pose(const Pose& pose, const NoiseModel& noise, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double dx = normal(rng), dy = normal(rng), dz = normal(rng);
  const double dh = normal(rng), dt = normal(rng);
  Pose out = pose;
  out.position += noise.pose_position_sigma * Vec3(dx, dy, dz);
  out.heading = wrap_angle(pose.heading + noise.pose_rotation_sigma * dh);
  out.camera_tilt = pose.camera_tilt + noise.pose_rotation_sigma * dt;
  return out;
}

Vec3 triangulate(std::span<const Observation> observations) {
  if (observations.size() < 2) throw InvalidArgument("triangulate: need at least two observations");

  std::vector<Vec3> rays;
  rays.reserve(observations.size());
  for (const auto& o : observations) rays.push_back(ray_direction(o));
  double max_sin = 0.0;
  for (std::size_t a = 0; a < rays.size(); ++a)
    for (std::size_t b = a + 1; b < rays.size(); ++b) max_sin = std::max(max_sin, rays[a].cross(rays[b]).norm());
  if (max_sin < 1e-6) throw DegenerateBaseline();

  // Condition the world frame: centre on the cameras and scale to unit mean
  // distance, so the unit-norm constraint does not bias far-from-origin points.
  Vec3 centre = Vec3::Zero();
  for (const auto& o : observations) centre += o.pose.position;
  centre /= static_cast<double>(observations.size());
  double spread = 0.0;
  for (const auto& o : observations) spread += (o.pose.position - centre).norm();
  spread /= static_cast<double>(observations.size());
  if (!(spread > 0.0)) spread = 1.0;
  Eigen::Matrix4d denorm = Eigen::Matrix4d::Identity();
  denorm.topLeftCorner<3, 3>() *= spread;
  denorm.topRightCorner<3, 1>() = centre;

  Eigen::MatrixXd a(2 * observations.size(), 4);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& o = observations[i];
    const Eigen::Matrix<double, 3, 4> p = projection_matrix(o.pose, o.intrinsics) * denorm;
    Eigen::RowVector4d r0 = o.pixel.x() * p.row(2) - p.row(0);
    Eigen::RowVector4d r1 = o.pixel.y() * p.row(2) - p.row(1);
    a.row(2 * i) = r0 / r0.norm();
    a.row(2 * i + 1) = r1 / r1.norm();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::Vector4d x = svd.matrixV().col(3);
  if (std::abs(x(3)) < 1e-12) throw DegenerateBaseline();
  return spread * x.head<3>() / x(3) + centre;
}

SkeletonSequence reconstruct_sequence(const std::vector<CaptureFrame>& frames, int joint_count,
                                      ReconstructionStats* stats) {
  SkeletonSequence seq;
  seq.timestamps.reserve(frames.size());
  seq.frames.assign(frames.size(), Skeleton(std::vector<Vec3>(joint_count, Vec3::Zero())));
  seq.carried.assign(frames.size(), std::vector<bool>(joint_count, true));
  ReconstructionStats local;

  std::vector<bool> have_previous(joint_count, false);
  std::vector<Observation> obs;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    seq.timestamps.push_back(frames[f].timestamp);
    for (int j = 0; j < joint_count; ++j) {
      obs.clear();
      for (const auto& cam : frames[f].cameras) {
        if (static_cast<int>(cam.detection.joints.size()) <= j) continue;
        const JointDetection& d = cam.detection.joints[j];
        if (d.visible) obs.push_back({cam.pose, cam.intrinsics, Pixel(d.u, d.v)});
      }
      bool solved = false;
      if (obs.size() >= 2) {
        try {
          const Vec3 x = triangulate(obs);
          if (x.allFinite()) {
            seq.frames[f].joints[j] = x;
            seq.carried[f][j] = false;
            solved = true;
          }
        } catch (const DegenerateBaseline&) {
          ++local.degenerate_joints;
        }
      }
      if (!solved) {
        ++local.carried_joints;
        if (have_previous[j]) seq.frames[f].joints[j] = seq.frames[f - 1].joints[j];
      } else {
        have_previous[j] = true;
      }
    }
  }

  // Leading gaps take the first solved value of that joint.
  for (int j = 0; j < joint_count; ++j) {
    std::size_t first = 0;
    while (first < frames.size() && seq.carried[first][j]) ++first;
    if (first == frames.size()) continue;
    for (std::size_t f = 0; f < first; ++f) seq.frames[f].joints[j] = seq.frames[first].joints[j];
  }

  if (stats) *stats = local;
  return seq;
}

ReconError recon_error(const SkeletonSequence& est, const SkeletonSequence& gt) {
  if (est.size() != gt.size()) throw InvalidArgument("recon_error: frame counts differ");
  ReconError err;
  err.per_frame_mpjpe.reserve(est.size());
  for (std::size_t f = 0; f < est.size(); ++f) {
    const auto& a = est.frames[f].joints;
    const auto& b = gt.frames[f].joints;
    if (a.size() != b.size() || a.empty()) throw InvalidArgument("recon_error: joint counts differ");
    double frame_sq = 0.0, frame_norm = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double sq = (a[j] - b[j]).squaredNorm();
      frame_sq += sq;
      frame_norm += std::sqrt(sq);
    }
    err.total += frame_sq;
    err.per_frame_mpjpe.push_back(frame_norm / static_cast<double>(a.size()));
  }
  if (!err.per_frame_mpjpe.empty()) {
    double s = 0.0;
    for (double v : err.per_frame_mpjpe) s += v;
    err.mean_mpjpe = s / static_cast<double>(err.per_frame_mpjpe.size());
  }
  return err;
}

Rng make_stream(std::uint64_t seed, std::uint64_t frame, std::uint64_t camera, std::uint64_t purpose) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ frame);
  h = splitmix64(h ^ (camera + 0x1000));
  h = splitmix64(h ^ (purpose + 0x2000000));
  return Rng(h);
}

}  // namespace aerocap
