#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "aerocap/actor.hpp"
#include "aerocap/capture.hpp"
#include "aerocap/costs.hpp"
#include "aerocap/forecast.hpp"
#include "aerocap/formation_planner.hpp"
#include "aerocap/local_planner.hpp"
#include "aerocap/occupancy.hpp"

namespace aerocap {

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  double occupancy = 1.0;
};

struct WorldSpec {
  Vec3 origin = Vec3(-25.0, -25.0, -2.0);
  double voxel_size = 1.0;
  GridDims dims{80, 70, 24};
  std::vector<Box> boxes;
  std::string grid_file;  // overrides origin/voxel_size/dims/boxes when set
  double occupancy_threshold = kDefaultOccupancyThreshold;
  double out_of_bounds = 0.0;
};

WorldModel build_world(const WorldSpec& spec);

struct Scenario {
  WorldSpec world;
  ActorSpec actor;
  FormationSpec formation;
  FormationPlannerParams planner;
  LocalPlannerParams local;
  KalmanParams kalman;
  CameraIntrinsics intrinsics;
  NoiseModel noise;
  DetectorParams detector;

  double duration = 75.0;       // s
  double capture_rate = 10.0;   // Hz, also the simulation tick
  double central_rate = 10.0;   // Hz
  double local_rate = 5.0;      // Hz
  double dt_fine = 0.5;         // s
  double theta0 = 0.0;          // rad, initial formation yaw
  bool adaptive = true;         // false freezes the yaw and lifts drones over obstacles
  double safety_margin = 1.0;   // m of signed distance required at every executed waypoint
  double execution_sigma = 0.0; // m, Gaussian tracking error added to executed positions
  std::uint64_t seed = 1;

  void validate() const;
  int ticks() const;
};

/// Thrown when an executed drone position comes closer than the safety margin
/// to an obstacle.
class SafetyViolation : public std::runtime_error {
 public:
  SafetyViolation(const std::string& report, double t, int drone, Vec3 position, double distance)
      : std::runtime_error(report), time(t), drone(drone), position(position), distance(distance) {}
  double time;
  int drone;
  Vec3 position;
  double distance;
};

/// Closed-loop capture without camera pose noise.
struct CapturedFrame {
  double t = 0.0;
  Skeleton ground_truth;
  Vec3 actor_estimate = Vec3::Zero();
  double formation_yaw = 0.0;
  std::vector<Pose> poses;
  std::vector<Detection2D> detections;
  std::vector<double> realized_tilt;  // rad, elevation above the true pelvis
  std::vector<double> clearance;      // m, signed distance at the executed position
};

struct CaptureRun {
  std::vector<CapturedFrame> frames;
  int central_plans = 0;
  int local_refines = 0;
  int degraded_refines = 0;
  double min_clearance = 0.0;
  double mean_realized_tilt = 0.0;
  double max_realized_tilt = 0.0;
  double min_realized_tilt = 0.0;
};

enum class StreamPurpose : std::uint64_t { kActorObservation = 1, kDetection = 2, kPoseNoise = 3, kExecution = 4 };

struct RunTrace {
  CaptureRun capture;
  std::vector<CaptureFrame> reconstruction_input;  // poses as the reconstruction sees them
  SkeletonSequence ground_truth;
  SkeletonSequence estimate;
  ReconstructionStats stats;
  ReconError error;
};

/// Receding-horizon loop: track, plan (central), refine (local), execute, capture.
/// Throws SafetyViolation on clearance below the safety margin.
CaptureRun simulate_capture(const Scenario& s);

/// Applies camera pose noise from `noise` and reconstructs offline.
RunTrace reconstruct_run(const Scenario& s, const CaptureRun& capture, const NoiseModel& noise);

/// simulate_capture followed by reconstruct_run with s.noise.
RunTrace run_scenario(const Scenario& s);

/// Per-frame CSV: frame,t,formation_yaw_deg,mpjpe_m,carried_joints, then per drone x,y,z,tilt_deg.
void write_frames_csv(std::ostream& os, const RunTrace& trace);
/// One JSON object per frame with poses, detections and skeletons.
void write_trace_jsonl(std::ostream& os, const RunTrace& trace);

/// Free-world walking scenario used by the tilt and robot sweeps.
Scenario default_scenario();
/// Straight walk past a tall mound on the left of the actor.
Scenario mound_scenario();

}  // namespace aerocap
