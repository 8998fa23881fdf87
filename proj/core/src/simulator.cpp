#include "aerocap/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

namespace aerocap {

namespace {

int ticks_per(double tick_rate, double rate, const char* name) {
  const double ratio = tick_rate / rate;
  const long r = std::lround(ratio);
  if (r < 1 || std::abs(ratio - static_cast<double>(r)) > 1e-9)
    throw InvalidArgument(std::string(name) + " must divide capture_rate");
  return static_cast<int>(r);
}

double elevation(const Vec3& from, const Vec3& to) {
  const Vec3 d = to - from;
  return std::atan2(d.z(), std::hypot(d.x(), d.y()));
}

std::vector<FineTrajectory> fixed_yaw_trajectories(const WorldModel& world, const ActorState& state,
                                                   const Scenario& s, double t, const std::vector<Vec3>& starts) {
  const FormationSpec& spec = s.formation;
  const ActorPath fine = forecast_path(state, s.planner.horizon, s.dt_fine, t);
  std::vector<FineTrajectory> out(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    const double theta = wrap_angle(s.theta0 + i * spec.delta_theta());
    std::vector<double> phi(fine.size());
    for (std::size_t k = 0; k < fine.size(); ++k) {
      const SphericalCoord slot{spec.rho_form, theta, spec.phi_form};
      phi[k] = lift_placement(world, fine.positions[k], slot, s.planner.clearance, s.detector.occlusion_threshold,
                              s.detector.quadrature_samples)
                   .phi;
    }
    // Climb ahead of obstacles: each waypoint takes the highest tilt needed
    // within one second either side.
    const int window = std::max(1, static_cast<int>(std::lround(1.0 / s.dt_fine)));
    FineTrajectory& traj = out[i];
    traj.timestamps = fine.timestamps;
    for (std::size_t k = 0; k < fine.size(); ++k) {
      double p = phi[k];
      for (int o = -window; o <= window; ++o) {
        const long idx = static_cast<long>(k) + o;
        if (idx >= 0 && idx < static_cast<long>(fine.size())) p = std::max(p, phi[idx]);
      }
      traj.points.push_back(spherical_to_world(fine.positions[k], {spec.rho_form, theta, p}));
    }
    traj.points[0] = starts[i];
  }
  return out;
}

}  // namespace

WorldModel build_world(const WorldSpec& spec) {
  if (!spec.grid_file.empty())
    return make_world(OccupancyGrid::load(spec.grid_file, spec.out_of_bounds), spec.occupancy_threshold);
  OccupancyGrid grid(spec.origin, spec.voxel_size, spec.dims, 0.0, spec.out_of_bounds);
  for (const auto& b : spec.boxes) grid.fill_box(b.lo, b.hi, b.occupancy);
  return make_world(std::move(grid), spec.occupancy_threshold);
}

void Scenario::validate() const {
  formation.validate();
  planner.grid.validate();
  intrinsics.validate();
  noise.validate();
  if (!(duration > 0.0)) throw InvalidArgument("duration must be positive");
  if (!(capture_rate > 0.0 && central_rate > 0.0 && local_rate > 0.0))
    throw InvalidArgument("rates must be positive");
  ticks_per(capture_rate, central_rate, "central_rate");
  ticks_per(capture_rate, local_rate, "local_rate");
  if (!(planner.dt > 0.0) || !(planner.horizon >= 2.0 * planner.dt))
    throw InvalidArgument("planner horizon must cover at least two coarse steps");
  if (!(dt_fine > 0.0) || dt_fine > planner.dt) throw InvalidArgument("dt_fine must lie in (0, planner.dt]");
  if (planner.neighbor_radius < 1) throw InvalidArgument("neighbor_radius must be >= 1");
  if (safety_margin < 0.0 || execution_sigma < 0.0) throw InvalidArgument("margins and sigmas must be >= 0");
}

int Scenario::ticks() const { return static_cast<int>(std::lround(duration * capture_rate)); }

CaptureRun simulate_capture(const Scenario& s) {
  s.validate();
  const WorldModel world = build_world(s.world);
  const ActorMotion actor(s.actor, s.duration + s.planner.horizon, s.seed);
  ActorTracker tracker(s.kalman);

  const int n = s.formation.n;
  const int ticks = s.ticks();
  const double tick_dt = 1.0 / s.capture_rate;
  const int central_every = ticks_per(s.capture_rate, s.central_rate, "central_rate");
  const int local_every = ticks_per(s.capture_rate, s.local_rate, "local_rate");
  const double yaw_rate = (kTwoPi / s.planner.grid.yaw_cells) * s.planner.neighbor_radius / s.planner.dt;

  std::normal_distribution<double> normal(0.0, 1.0);
  CaptureRun run;
  run.frames.reserve(ticks);
  run.min_clearance = std::numeric_limits<double>::infinity();
  double tilt_sum = 0.0;
  std::size_t tilt_count = 0;
  run.max_realized_tilt = -std::numeric_limits<double>::infinity();
  run.min_realized_tilt = std::numeric_limits<double>::infinity();

  double theta = wrap_angle(s.theta0);
  double theta_goal = theta;
  FormationPlan plan;
  std::vector<FineTrajectory> trajectories;

  for (int k = 0; k < ticks; ++k) {
    const double t = k * tick_dt;
    const Vec3 actor_true = actor.position(t);
    {
      Rng obs_rng = make_stream(s.seed, k, 0, static_cast<std::uint64_t>(StreamPurpose::kActorObservation));
      const Vec3 noise(normal(obs_rng), normal(obs_rng), normal(obs_rng));
      tracker.observe(t, actor_true + s.kalman.position_sigma * noise);
    }
    const ActorState& est = tracker.state();

    if (k % central_every == 0 && s.adaptive) {
      plan = plan_formation(world, est, s.formation, theta, s.planner, t);
      theta_goal = plan.theta_sequence.at(1);
      ++run.central_plans;
    }

    if (k % local_every == 0) {
      std::vector<Vec3> starts(n);
      for (int i = 0; i < n; ++i)
        starts[i] = trajectories.empty() ? Vec3::Zero() : trajectories[i].position_at(t);

      if (s.adaptive) {
        if (trajectories.empty())
          for (int i = 0; i < n; ++i) starts[i] = plan.targets.drones[i].front();
        const ActorPath fine_actor = forecast_path(est, s.planner.horizon, s.dt_fine, t);
        std::vector<FineTrajectory> targets(n);
        for (int i = 0; i < n; ++i) targets[i] = upsample_plan(plan, i, s.dt_fine);
        // Peers see the previous round's trajectories (or targets on the first round).
        const std::vector<FineTrajectory>& shared = trajectories.empty() ? targets : trajectories;
        std::vector<FineTrajectory> next(n);
        for (int i = 0; i < n; ++i) {
          PeerForecast peers;
          for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            FineTrajectory p;
            p.timestamps = targets[i].timestamps;
            for (double ts : p.timestamps) p.points.push_back(shared[j].position_at(ts));
            peers.push_back(std::move(p));
          }
          FineTrajectory init = targets[i];
          init.points[0] = starts[i];
          const RefineResult r = refine(init, world, fine_actor, targets[i], peers, s.local);
          next[i] = r.trajectory;
          ++run.local_refines;
          if (r.degraded) ++run.degraded_refines;
        }
        trajectories = std::move(next);
      } else {
        if (trajectories.empty()) {
          for (int i = 0; i < n; ++i) {
            const SphericalCoord slot{s.formation.rho_form, wrap_angle(s.theta0 + i * s.formation.delta_theta()),
                                      s.formation.phi_form};
            starts[i] = lift_placement(world, est.position, slot, s.planner.clearance,
                                       s.detector.occlusion_threshold, s.detector.quadrature_samples)
                            .position;
          }
        }
        trajectories = fixed_yaw_trajectories(world, est, s, t, starts);
        ++run.local_refines;
      }
    }

    CapturedFrame frame;
    frame.t = t;
    frame.ground_truth = actor.skeleton(t);
    frame.actor_estimate = est.position;
    frame.formation_yaw = theta;
    for (int i = 0; i < n; ++i) {
      Vec3 pos = trajectories[i].position_at(t);
      if (s.execution_sigma > 0.0) {
        Rng exec_rng = make_stream(s.seed, k, i, static_cast<std::uint64_t>(StreamPurpose::kExecution));
        pos += s.execution_sigma * Vec3(normal(exec_rng), normal(exec_rng), normal(exec_rng));
      }
      const double clearance = world.sdf.distance_at(pos);
      if (clearance < s.safety_margin) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "safety violation: drone %d at t=%.2f s, position (%.3f, %.3f, %.3f), clearance %.3f m < %.3f m",
                      i, t, pos.x(), pos.y(), pos.z(), clearance, s.safety_margin);
        throw SafetyViolation(buf, t, i, pos, clearance);
      }
      run.min_clearance = std::min(run.min_clearance, clearance);
      const Pose pose = look_at(pos, est.position);
      Rng det_rng = make_stream(s.seed, k, i, static_cast<std::uint64_t>(StreamPurpose::kDetection));
      frame.detections.push_back(
          simulate_detections(frame.ground_truth, pose, s.intrinsics, world, s.noise, det_rng, s.detector));
      frame.poses.push_back(pose);
      const double tilt = elevation(actor_true, pos);
      frame.realized_tilt.push_back(tilt);
      frame.clearance.push_back(clearance);
      tilt_sum += tilt;
      ++tilt_count;
      run.max_realized_tilt = std::max(run.max_realized_tilt, tilt);
      run.min_realized_tilt = std::min(run.min_realized_tilt, tilt);
    }
    run.frames.push_back(std::move(frame));

    // The formation turns toward the first planned cell at one cell per coarse step.
    const double step = yaw_rate * tick_dt;
    const double diff = angle_diff(theta, theta_goal);
    theta = wrap_angle(theta + std::clamp(diff, -step, step));
  }
  run.mean_realized_tilt = tilt_count ? tilt_sum / static_cast<double>(tilt_count) : 0.0;
  return run;
}

RunTrace reconstruct_run(const Scenario& s, const CaptureRun& capture, const NoiseModel& noise) {
  noise.validate();
  RunTrace trace;
  trace.capture = capture;
  trace.reconstruction_input.reserve(capture.frames.size());
  for (std::size_t f = 0; f < capture.frames.size(); ++f) {
    const CapturedFrame& cf = capture.frames[f];
    CaptureFrame frame;
    frame.timestamp = cf.t;
    for (std::size_t i = 0; i < cf.poses.size(); ++i) {
      Rng rng = make_stream(s.seed, f, i, static_cast<std::uint64_t>(StreamPurpose::kPoseNoise));
      frame.cameras.push_back({static_cast<int>(i), perturb_camera_pose(cf.poses[i], noise, rng), s.intrinsics,
                               cf.detections[i]});
    }
    trace.reconstruction_input.push_back(std::move(frame));
    trace.ground_truth.timestamps.push_back(cf.t);
    trace.ground_truth.frames.push_back(cf.ground_truth);
    trace.ground_truth.carried.emplace_back(cf.ground_truth.size(), false);
  }
  trace.estimate = reconstruct_sequence(trace.reconstruction_input, kJointCount, &trace.stats);
  trace.error = recon_error(trace.estimate, trace.ground_truth);
  return trace;
}

RunTrace run_scenario(const Scenario& s) { return reconstruct_run(s, simulate_capture(s), s.noise); }

void write_frames_csv(std::ostream& os, const RunTrace& trace) {
  const auto& frames = trace.capture.frames;
  const std::size_t n = frames.empty() ? 0 : frames.front().poses.size();
  os << "frame,t,formation_yaw_deg,mpjpe_m,carried_joints";
  for (std::size_t i = 0; i < n; ++i) os << ",d" << i << "_x,d" << i << "_y,d" << i << "_z,d" << i << "_tilt_deg";
  os << '\n';
  char buf[128];
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& cf = frames[f];
    int carried = 0;
    for (bool c : trace.estimate.carried[f]) carried += c ? 1 : 0;
    std::snprintf(buf, sizeof(buf), "%zu,%.3f,%.6f,%.9f,%d", f, cf.t, rad_to_deg(cf.formation_yaw),
                  trace.error.per_frame_mpjpe[f], carried);
    os << buf;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& p = cf.poses[i].position;
      std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f,%.4f", p.x(), p.y(), p.z(), rad_to_deg(cf.realized_tilt[i]));
      os << buf;
    }
    os << '\n';
  }
}

void write_trace_jsonl(std::ostream& os, const RunTrace& trace) {
  using nlohmann::json;
  const auto& frames = trace.capture.frames;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const CapturedFrame& cf = frames[f];
    json drones = json::array();
    for (std::size_t i = 0; i < cf.poses.size(); ++i) {
      const Pose& p = cf.poses[i];
      const Pose& q = trace.reconstruction_input[f].cameras[i].pose;
      json joints = json::array();
      for (const auto& d : cf.detections[i].joints) joints.push_back({d.u, d.v, d.confidence, d.visible ? 1 : 0});
      drones.push_back({{"pose", {p.position.x(), p.position.y(), p.position.z(), p.heading, p.camera_tilt}},
                        {"recon_pose", {q.position.x(), q.position.y(), q.position.z(), q.heading, q.camera_tilt}},
                        {"tilt", cf.realized_tilt[i]},
                        {"clearance", cf.clearance[i]},
                        {"detections", std::move(joints)}});
    }
    json gt = json::array(), est = json::array();
    for (const auto& j : cf.ground_truth.joints) gt.push_back({j.x(), j.y(), j.z()});
    for (const auto& j : trace.estimate.frames[f].joints) est.push_back({j.x(), j.y(), j.z()});
    json line = {{"frame", f},
                 {"t", cf.t},
                 {"formation_yaw", cf.formation_yaw},
                 {"actor_estimate", {cf.actor_estimate.x(), cf.actor_estimate.y(), cf.actor_estimate.z()}},
                 {"drones", std::move(drones)},
                 {"ground_truth", std::move(gt)},
                 {"estimate", std::move(est)},
                 {"mpjpe", trace.error.per_frame_mpjpe[f]}};
    os << line.dump() << '\n';
  }
}

Scenario default_scenario() { return Scenario{}; }

Scenario mound_scenario() {
  Scenario s;
  s.world.origin = Vec3(-15.0, -20.0, -2.0);
  s.world.dims = GridDims{90, 45, 24};
  s.world.boxes = {Box{Vec3(22.0, 3.0, -2.0), Vec3(34.0, 16.0, 8.0), 1.0}};
  s.actor.kind = ActorKind::kWalk;
  s.actor.waypoints = {Vec3(0, 0, 0), Vec3(60, 0, 0)};
  s.actor.loop = false;
  s.duration = 40.0;
  s.theta0 = 0.0;
  return s;
}

}  // namespace aerocap
