#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

#include "aerocap/simulator.hpp"

using namespace aerocap;

namespace {

Scenario quiet_static(double duration) {
  Scenario s = default_scenario();
  s.actor.kind = ActorKind::kStatic;
  s.noise.pixel_sigma = 0.0;
  s.noise.pose_position_sigma = 0.0;
  s.noise.pose_rotation_sigma = 0.0;
  s.noise.miss_base_rate = 0.0;
  s.noise.miss_tilt_gain = 0.0;
  s.noise.swap_rate = 0.0;
  s.duration = duration;
  return s;
}

std::string frames_csv(const RunTrace& t) {
  std::ostringstream os;
  write_frames_csv(os, t);
  return os.str();
}

}  // namespace

TEST(Actor, StaticWalkAndSoccer) {
  ActorSpec st;
  st.kind = ActorKind::kStatic;
  st.waypoints = {Vec3(3, 4, 0)};
  const ActorMotion a(st, 10.0, 1);
  EXPECT_EQ(a.position(0.0), a.position(7.3));
  EXPECT_NEAR(a.position(2.0).z(), kPelvisHeight, 1e-12);

  ActorSpec walk;
  walk.waypoints = {Vec3(0, 0, 0), Vec3(100, 0, 0)};
  walk.loop = false;
  const ActorMotion w(walk, 30.0, 1);
  EXPECT_NEAR(w.position(10.0).x(), 15.0, 1e-9);
  EXPECT_NEAR(w.heading(10.0), 0.0, 1e-12);

  ActorSpec soccer;
  soccer.kind = ActorKind::kSoccer;
  const ActorMotion s1(soccer, 60.0, 4), s2(soccer, 60.0, 4);
  for (double t = 0.0; t <= 60.0; t += 0.7) {
    const Vec3 p = s1.position(t);
    EXPECT_LE(std::abs(p.x()), soccer.arena_half_size + 1e-9);
    EXPECT_LE(std::abs(p.y()), soccer.arena_half_size + 1e-9);
    EXPECT_EQ(p, s2.position(t));
  }
  EXPECT_EQ(actor_kind_from_string(to_string(ActorKind::kSoccer)), ActorKind::kSoccer);
  EXPECT_THROW(actor_kind_from_string("run"), InvalidArgument);
}

TEST(Scenario, Validation) {
  Scenario s = default_scenario();
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.ticks(), 750);
  s.local_rate = 3.0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = default_scenario();
  s.duration = -1;
  EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(Simulator, ZeroNoiseStaticActorReconstructsExactly) {
  const RunTrace t = run_scenario(quiet_static(5.0));
  ASSERT_EQ(t.estimate.size(), 50u);
  EXPECT_LT(t.error.mean_mpjpe, 0.05);
  EXPECT_EQ(t.stats.carried_joints, 0u);
  EXPECT_GE(t.capture.min_clearance, 1.0);
  EXPECT_GT(t.capture.central_plans, 0);
  EXPECT_GT(t.capture.local_refines, 0);
}

TEST(Simulator, ColumnOnFormationSlotChangesYaw) {
  Scenario s = quiet_static(4.0);
  s.actor.waypoints = {Vec3(0, 0, 0)};
  // Drone 0 starts due east at 10 m; put a tall column on that slot.
  s.world.boxes.push_back({Vec3(7, -3, -2), Vec3(13, 3, 20), 1.0});
  const CaptureRun run = simulate_capture(s);
  EXPECT_GT(std::abs(angle_diff(run.frames.back().formation_yaw, s.theta0)), deg_to_rad(20));
  EXPECT_GE(run.min_clearance, s.safety_margin);
}

TEST(Simulator, DeterministicPerSeed) {
  Scenario s = default_scenario();
  s.duration = 3.0;
  const std::string a = frames_csv(run_scenario(s));
  EXPECT_EQ(a, frames_csv(run_scenario(s)));
  s.seed = 2;
  EXPECT_NE(a, frames_csv(run_scenario(s)));
}

TEST(Simulator, FramesCsvShape) {
  Scenario s = default_scenario();
  s.duration = 1.0;
  const RunTrace t = run_scenario(s);
  std::istringstream is(frames_csv(t));
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header.rfind("frame,t,formation_yaw_deg,mpjpe_m,carried_joints,d0_x", 0), 0u);
  int rows = 0;
  for (std::string l; std::getline(is, l);) ++rows;
  EXPECT_EQ(rows, 10);

  std::ostringstream trace;
  write_trace_jsonl(trace, t);
  EXPECT_EQ(std::ranges::count(trace.str(), '\n'), 10);
}

TEST(Simulator, PoseNoiseRaisesErrorOnSameCapture) {
  Scenario s = quiet_static(3.0);
  const CaptureRun run = simulate_capture(s);
  NoiseModel noisy = s.noise;
  noisy.pose_position_sigma = 0.5;
  EXPECT_GT(reconstruct_run(s, run, noisy).error.mean_mpjpe, reconstruct_run(s, run, s.noise).error.mean_mpjpe);
}

TEST(Simulator, FixedFormationOverMoundViolatesLargeMargin) {
  Scenario s = mound_scenario();
  s.adaptive = false;
  s.safety_margin = 3.0;
  EXPECT_THROW(simulate_capture(s), SafetyViolation);
}
