#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "aerocap/capture.hpp"
#include "support/oracles.hpp"

using namespace aerocap;

namespace {

WorldModel empty_world() { return make_world(OccupancyGrid(Vec3(-30, -30, -5), 1.0, {60, 60, 30})); }

Observation observe(const Pose& pose, const Vec3& p) {
  const CameraIntrinsics intr;
  return {pose, intr, *project(pose, intr, p)};
}

std::vector<Pose> ring(const Vec3& target, int n, double radius, double height, double spread = kTwoPi) {
  std::vector<Pose> poses;
  for (int i = 0; i < n; ++i) {
    const double a = spread * i / n;
    poses.push_back(look_at(target + Vec3(radius * std::cos(a), radius * std::sin(a), height), target));
  }
  return poses;
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST(Projection, PrincipalPointAndOffsets) {
  Pose pose;
  pose.position = Vec3::Zero();
  pose.heading = 0.0;
  pose.camera_tilt = 0.0;
  const CameraIntrinsics intr;
  const auto c = project(pose, intr, Vec3(5, 0, 0));
  ASSERT_TRUE(c);
  EXPECT_NEAR(c->x(), 320.0, 1e-12);
  EXPECT_NEAR(c->y(), 240.0, 1e-12);
  // One metre to the left at five metres is 64 px left of centre; one metre up
  // is 64 px above.
  const auto l = project(pose, intr, Vec3(5, 1, 1));
  EXPECT_NEAR(l->x(), 256.0, 1e-9);
  EXPECT_NEAR(l->y(), 176.0, 1e-9);
  EXPECT_FALSE(project(pose, intr, Vec3(-1, 0, 0)));
}

TEST(Projection, LookAtCentresTarget) {
  const Vec3 target(1, 2, 1);
  for (const Pose& p : ring(target, 6, 8.0, 3.0)) {
    const auto px = project(p, CameraIntrinsics{}, target);
    ASSERT_TRUE(px);
    EXPECT_NEAR(px->x(), 320.0, 1e-9);
    EXPECT_NEAR(px->y(), 240.0, 1e-9);
    EXPECT_GT(p.camera_tilt, 0.0);
  }
}

TEST(Projection, MatrixAgreesWithProject) {
  const Pose pose = look_at(Vec3(7, -3, 4), Vec3(0, 0, 1));
  const auto m = projection_matrix(pose, CameraIntrinsics{});
  const Vec3 p(0.3, 0.2, 1.4);
  const Eigen::Vector3d h = m * Eigen::Vector4d(p.x(), p.y(), p.z(), 1.0);
  const auto px = project(pose, CameraIntrinsics{}, p);
  EXPECT_NEAR(h.x() / h.z(), px->x(), 1e-9);
  EXPECT_NEAR(h.y() / h.z(), px->y(), 1e-9);
}

TEST(Triangulate, NoiselessRoundTrip) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  const Vec3 centre(20, -10, 1);
  for (int views : {2, 5}) {
    const auto poses = ring(centre, views, 10.0, 2.7);
    for (int trial = 0; trial < 100; ++trial) {
      const Vec3 p = centre + Vec3(u(rng), u(rng), u(rng));
      std::vector<Observation> obs;
      for (const auto& pose : poses) obs.push_back(observe(pose, p));
      EXPECT_LT((triangulate(obs) - p).norm(), 1e-6) << views;
    }
  }
}

TEST(Triangulate, WorldScaleEquivariant) {
  const Vec3 p(0.4, -0.3, 1.2);
  const auto poses = ring(Vec3(0, 0, 1), 3, 9.0, 2.0);
  for (double s : {0.01, 1.0, 100.0}) {
    std::vector<Observation> obs;
    for (Pose pose : poses) {
      pose.position *= s;
      obs.push_back(observe(pose, s * p));
    }
    EXPECT_LT((triangulate(obs) / s - p).norm(), 1e-8) << s;
  }
}

TEST(Triangulate, MoreViewsReduceNoise) {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> n(0, 2.0);
  const Vec3 p(0, 0, 1);
  auto trial_error = [&](int views) {
    std::vector<double> errs;
    const auto poses = ring(p, views, 10.0, 2.7);
    for (int t = 0; t < 300; ++t) {
      std::vector<Observation> obs;
      for (const auto& pose : poses) {
        Observation o = observe(pose, p);
        o.pixel += Pixel(n(rng), n(rng));
        obs.push_back(o);
      }
      errs.push_back((triangulate(obs) - p).norm());
    }
    return median(errs);
  };
  EXPECT_LT(trial_error(5), trial_error(2));
}

TEST(Triangulate, WideBaselineBeatsNarrow) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0, 2.0);
  const Vec3 p(0, 0, 1);
  auto trial_error = [&](double baseline) {
    const Pose a = look_at(p + Vec3(10, 0, 0), p);
    const Pose b = look_at(p + Vec3(10 * std::cos(baseline), 10 * std::sin(baseline), 0), p);
    std::vector<double> errs;
    for (int t = 0; t < 500; ++t) {
      std::vector<Observation> obs{observe(a, p), observe(b, p)};
      for (auto& o : obs) o.pixel += Pixel(n(rng), n(rng));
      errs.push_back((triangulate(obs) - p).norm());
    }
    return median(errs);
  };
  EXPECT_LT(trial_error(deg_to_rad(90)), trial_error(deg_to_rad(10)));
}

TEST(Triangulate, DegenerateAndTooFew) {
  const Vec3 p(0, 0, 1);
  const Pose a = look_at(Vec3(10, 0, 1), p);
  const Pose b = look_at(Vec3(20, 0, 1), p);
  const std::vector<Observation> collinear{observe(a, p), observe(b, p)};
  EXPECT_THROW(triangulate(collinear), DegenerateBaseline);
  const std::vector<Observation> one{observe(a, p)};
  EXPECT_THROW(triangulate(one), InvalidArgument);
}

TEST(NoiseModel, ProbabilitiesAndValidation) {
  NoiseModel m;
  EXPECT_DOUBLE_EQ(m.miss_probability(0.0), 0.02);
  EXPECT_NEAR(m.miss_probability(1.0), 0.17, 1e-15);
  EXPECT_NEAR(m.swap_probability(kPi / 3), 0.05, 1e-15);
  EXPECT_NEAR(m.swap_probability(kPi / 6), 0.025, 1e-15);
  m.pixel_sigma = -1;
  EXPECT_THROW(m.validate(), InvalidArgument);
  m = NoiseModel{};
  m.swap_rate = 1.5;
  EXPECT_THROW(m.validate(), InvalidArgument);
}

TEST(Detections, MissRateWithinThreeSigma) {
  const WorldModel w = empty_world();
  const Skeleton gt = walking_pose(Vec3(0, 0, kPelvisHeight), 0.0, 0.0);
  const Pose pose = look_at(Vec3(8, 0, 4), Vec3(0, 0, 1));
  NoiseModel noise;
  noise.pixel_sigma = 0.0;
  noise.swap_rate = 0.0;
  const double p = noise.miss_probability(pose.camera_tilt);
  int missed = 0, total = 0;
  for (int frame = 0; frame < 400; ++frame) {
    Rng rng = make_stream(5, frame, 0, 2);
    const Detection2D d = simulate_detections(gt, pose, CameraIntrinsics{}, w, noise, rng);
    for (const auto& j : d.joints) missed += !j.visible, ++total;
  }
  const double sigma = std::sqrt(p * (1 - p) / total);
  EXPECT_NEAR(static_cast<double>(missed) / total, p, 3 * sigma);
}

TEST(Detections, NoiselessMatchesProjection) {
  const WorldModel w = empty_world();
  const Skeleton gt = walking_pose(Vec3(0, 0, kPelvisHeight), 0.4, 1.0);
  const Pose pose = look_at(Vec3(-6, 5, 3), Vec3(0, 0, 1));
  NoiseModel noise;
  noise.pixel_sigma = noise.miss_base_rate = noise.miss_tilt_gain = noise.swap_rate = 0.0;
  Rng rng(1);
  const Detection2D d = simulate_detections(gt, pose, CameraIntrinsics{}, w, noise, rng);
  for (std::size_t j = 0; j < gt.size(); ++j) {
    ASSERT_TRUE(d.joints[j].visible);
    const Pixel px = *project(pose, CameraIntrinsics{}, gt.joints[j]);
    EXPECT_EQ(d.joints[j].u, px.x());
    EXPECT_EQ(d.joints[j].v, px.y());
  }
}

TEST(Detections, WallHidesActor) {
  OccupancyGrid g(Vec3(-30, -30, -5), 1.0, {60, 60, 30});
  // Thick enough that most of every camera-to-joint segment is inside it.
  g.fill_box(Vec3(1, -10, -5), Vec3(7.5, 10, 20), 1.0);
  const WorldModel w = make_world(std::move(g));
  const Skeleton gt = walking_pose(Vec3(0, 0, kPelvisHeight), 0.0, 0.0);
  NoiseModel noise;
  noise.miss_base_rate = noise.miss_tilt_gain = 0.0;
  Rng rng(2);
  const Detection2D d = simulate_detections(gt, look_at(Vec3(8, 0, 2), Vec3(0, 0, 1)), CameraIntrinsics{}, w,
                                            noise, rng);
  for (const auto& j : d.joints) EXPECT_FALSE(j.visible);
}

TEST(Detections, SwapExchangesLeftRight) {
  const WorldModel w = empty_world();
  const Skeleton gt = walking_pose(Vec3(0, 0, kPelvisHeight), 0.0, 0.0);
  const Pose pose = look_at(Vec3(8, 0, 2), Vec3(0, 0, 1));
  NoiseModel noise;
  noise.pixel_sigma = noise.miss_base_rate = noise.miss_tilt_gain = 0.0;
  noise.swap_rate = 1.0;
  Pose steep = pose;
  steep.camera_tilt = kPi / 3;
  // A steep enough tilt swaps every pair.
  Rng rng(3);
  const Detection2D d = simulate_detections(gt, steep, CameraIntrinsics{}, w, noise, rng);
  Rng rng2(3);
  noise.swap_rate = 0.0;
  const Detection2D plain = simulate_detections(gt, steep, CameraIntrinsics{}, w, noise, rng2);
  for (const auto& [l, r] : left_right_pairs()) {
    EXPECT_EQ(d.joints[l].u, plain.joints[r].u);
    EXPECT_EQ(d.joints[r].v, plain.joints[l].v);
  }
}

TEST(PoseNoise, SampleStdWithinFivePercent) {
  NoiseModel noise;
  noise.pose_position_sigma = 0.25;
  noise.pose_rotation_sigma = 0.02;
  const Pose base = look_at(Vec3(3, 4, 5), Vec3::Zero());
  double sx = 0.0, sh = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    Rng rng = make_stream(9, i, 0, 3);
    const Pose p = perturb_camera_pose(base, noise, rng);
    sx += (p.position.x() - base.position.x()) * (p.position.x() - base.position.x());
    sh += angle_diff(p.heading, base.heading) * angle_diff(p.heading, base.heading);
  }
  EXPECT_NEAR(std::sqrt(sx / n), 0.25, 0.05 * 0.25);
  EXPECT_NEAR(std::sqrt(sh / n), 0.02, 0.05 * 0.02);
}

TEST(Streams, DeterministicAndDistinct) {
  Rng a = make_stream(1, 2, 3, 4), b = make_stream(1, 2, 3, 4);
  EXPECT_EQ(a(), b());
  std::vector<std::uint64_t> firsts;
  for (std::uint64_t f = 0; f < 3; ++f)
    for (std::uint64_t c = 0; c < 3; ++c)
      for (std::uint64_t p = 1; p <= 4; ++p) firsts.push_back(make_stream(1, f, c, p)());
  std::sort(firsts.begin(), firsts.end());
  EXPECT_EQ(std::adjacent_find(firsts.begin(), firsts.end()), firsts.end());
}

TEST(Reconstruct, CarriesMissingJoints) {
  const Skeleton gt = walking_pose(Vec3(0, 0, kPelvisHeight), 0.0, 0.0);
  const auto poses = ring(Vec3(0, 0, 1), 3, 9.0, 2.0);
  std::vector<CaptureFrame> frames(3);
  for (int f = 0; f < 3; ++f) {
    frames[f].timestamp = 0.1 * f;
    for (int c = 0; c < 3; ++c) {
      CameraFrame cam;
      cam.camera_id = c;
      cam.pose = poses[c];
      cam.detection.joints.resize(kJointCount);
      for (int j = 0; j < kJointCount; ++j) {
        const Pixel px = *project(poses[c], cam.intrinsics, gt.joints[j]);
        cam.detection.joints[j] = {px.x(), px.y(), 1.0, true};
      }
      frames[f].cameras.push_back(cam);
    }
  }
  // Joint 0 is seen by one camera only in frames 0 and 1; joint 1 only in frame 2.
  for (int c = 1; c < 3; ++c) {
    frames[0].cameras[c].detection.joints[0].visible = false;
    frames[1].cameras[c].detection.joints[0].visible = false;
  }
  for (int f = 0; f < 2; ++f)
    for (int c = 0; c < 3; ++c) frames[f].cameras[c].detection.joints[5].visible = false;
  ReconstructionStats stats;
  const SkeletonSequence seq = reconstruct_sequence(frames, kJointCount, &stats);
  ASSERT_EQ(seq.size(), 3u);
  EXPECT_EQ(stats.carried_joints, 4u);
  EXPECT_TRUE(seq.carried[0][0]);
  EXPECT_TRUE(seq.carried[1][0]);
  EXPECT_FALSE(seq.carried[2][0]);
  EXPECT_TRUE(seq.carried[0][5]);
  EXPECT_FALSE(seq.carried[2][5]);
  // Leading gaps take the first available estimate.
  EXPECT_EQ(seq.frames[0].joints[0], seq.frames[2].joints[0]);
  EXPECT_EQ(seq.frames[1].joints[5], seq.frames[2].joints[5]);
  for (int j = 0; j < kJointCount; ++j) EXPECT_LT((seq.frames[2].joints[j] - gt.joints[j]).norm(), 1e-6);
}

TEST(ReconError, ExamplesAndOracle) {
  SkeletonSequence gt, est;
  gt.timestamps = est.timestamps = {0.0, 0.1};
  gt.frames = {Skeleton(), Skeleton()};
  est = gt;
  EXPECT_EQ(recon_error(est, gt).total, 0.0);
  est.frames[1].joints[3] += Vec3(0, 0.3, 0.4);
  const ReconError e = recon_error(est, gt);
  EXPECT_NEAR(e.total, 0.25, 1e-15);
  EXPECT_NEAR(e.per_frame_mpjpe[1], 0.5 / kJointCount, 1e-15);
  EXPECT_NEAR(e.mean_mpjpe, 0.25 / kJointCount, 1e-15);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    SkeletonSequence a, b;
    for (int f = 0; f < 7; ++f) {
      a.timestamps.push_back(f);
      b.timestamps.push_back(f);
      Skeleton x, y;
      for (int j = 0; j < kJointCount; ++j) {
        x.joints[j] = Vec3(n(rng), n(rng), n(rng));
        y.joints[j] = Vec3(n(rng), n(rng), n(rng));
      }
      a.frames.push_back(x);
      b.frames.push_back(y);
    }
    EXPECT_NEAR(recon_error(a, b).total, oracle::recon_total(a, b), 1e-12);
  }
  est.frames.pop_back();
  EXPECT_THROW(recon_error(est, gt), InvalidArgument);
}

TEST(Skeleton, WalkingPoseIsRigidAcrossGait) {
  const auto base = walking_pose(Vec3(0, 0, kPelvisHeight), 0.0, 0.0).bone_lengths();
  for (double phase : {0.5, 1.7, 3.0}) {
    const auto l = walking_pose(Vec3(3, -1, kPelvisHeight), 1.2, phase).bone_lengths();
    ASSERT_EQ(l.size(), base.size());
    for (std::size_t b = 0; b < l.size(); ++b) EXPECT_NEAR(l[b], base[b], 1e-9) << b;
  }
  EXPECT_EQ(joint_name(0), "nose");
}
