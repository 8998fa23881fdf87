// aerocap: plan, simulate, sweep and reconstruct from the command line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aerocap/capture_io.hpp"
#include "aerocap/config.hpp"
#include "aerocap/experiments.hpp"
#include "aerocap/formation_planner.hpp"
#include "aerocap/local_planner.hpp"
#include "aerocap/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace aerocap;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kSafetyViolation = 3, kIoError = 4 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = "aerocap_out";
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  bool trace = false;
};

// All artifacts go through this so nothing lands outside --out.
class OutputDir {
 public:
  explicit OutputDir(const fs::path& root) : root_(root) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw IoError("cannot create output directory " + root_.string() + ": " + ec.message());
  }

  template <typename Fn>
  fs::path write(const std::string& name, Fn&& fn) {
    const fs::path path = root_ / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    fn(os);
    os.flush();
    if (!os) throw IoError("write failed: " + path.string());
    written_.push_back(name);
    return path;
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path root_;
  std::vector<std::string> written_;
};

Config resolve_config(const GlobalOptions& g, const std::string& fallback_preset = "default") {
  Config c;
  if (!g.config_path.empty()) {
    c = load_config(g.config_path);
  } else {
    json doc = {{"preset", fallback_preset}};
    c = config_from_json(doc);
  }
  if (g.seed) {
    c.scenario.seed = *g.seed;
    c.scenario.noise.rng_seed = *g.seed;
    c.sweep.base_seed = *g.seed;
  }
  if (g.jobs) {
    if (*g.jobs < 0) throw ConfigError("--jobs: must be >= 0");
    c.sweep.jobs = *g.jobs;
  }
  return c;
}

void write_manifest(OutputDir& out, const std::string& command, const Config& config,
                    const std::vector<std::uint64_t>& seeds, json extra = json::object()) {
  json m = {{"tool", "aerocap"},
            {"version", "0.1.0"},
            {"command", command},
            {"config", config_to_json(config)},
            {"seeds", seeds},
            {"outputs", out.written()}};
  for (auto& [k, v] : extra.items()) m[k] = v;
  out.write("config.json", [&](std::ostream& os) { os << config_to_json(config).dump(2) << '\n'; });
  m["outputs"].push_back("config.json");
  out.write("manifest.json", [&](std::ostream& os) { os << m.dump(2) << '\n'; });
}

std::string num(double v, const char* spec = "%.9g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

void write_points_csv(std::ostream& os, const std::vector<double>& ts, const std::vector<std::vector<Vec3>>& drones) {
  os << "drone,step,t,x,y,z\n";
  for (std::size_t i = 0; i < drones.size(); ++i)
    for (std::size_t k = 0; k < drones[i].size(); ++k)
      os << i << ',' << k << ',' << num(ts[k]) << ',' << num(drones[i][k].x()) << ',' << num(drones[i][k].y()) << ','
         << num(drones[i][k].z()) << '\n';
}

int cmd_plan(const GlobalOptions& g) {
  const Config config = resolve_config(g);
  const Scenario& s = config.scenario;
  const WorldModel world = build_world(s.world);
  const ActorMotion actor(s.actor, s.planner.horizon + 1.0, s.seed);

  ActorState state;
  state.position = actor.position(0.0);
  const double h = 0.1;
  state.velocity = (actor.position(h) - actor.position(0.0)) / h;
  state.covariance.setIdentity();
  state.covariance *= s.kalman.position_sigma * s.kalman.position_sigma;

  YawStateSpace space;
  const FormationPlan plan = plan_formation(world, state, s.formation, s.theta0, s.planner, 0.0, &space);
  const ActorPath fine_actor = forecast_path(state, s.planner.horizon, s.dt_fine, 0.0);

  std::vector<FineTrajectory> targets, refined;
  for (int i = 0; i < s.formation.n; ++i) targets.push_back(upsample_plan(plan, i, s.dt_fine));
  int degraded = 0;
  for (int i = 0; i < s.formation.n; ++i) {
    PeerForecast peers;
    for (int j = 0; j < s.formation.n; ++j)
      if (j != i) peers.push_back(targets[j]);
    const RefineResult r = refine(targets[i], world, fine_actor, targets[i], peers, s.local);
    degraded += r.degraded ? 1 : 0;
    refined.push_back(r.trajectory);
  }

  OutputDir out(g.out_dir);
  out.write("yaw_sequence.csv", [&](std::ostream& os) {
    os << "step,t,cell,theta_deg\n";
    for (std::size_t k = 0; k < plan.theta_sequence.size(); ++k) {
      const int cell = k == 0 ? plan.start_cell : plan.cells[k - 1];
      os << k << ',' << num(plan.timestamps[k]) << ',' << cell << ',' << num(rad_to_deg(plan.theta_sequence[k]))
         << '\n';
    }
  });
  out.write("coarse_waypoints.csv",
            [&](std::ostream& os) { write_points_csv(os, plan.targets.timestamps, plan.targets.drones); });
  out.write("refined_waypoints.csv", [&](std::ostream& os) {
    std::vector<std::vector<Vec3>> pts;
    for (const auto& r : refined) pts.push_back(r.points);
    write_points_csv(os, refined.front().timestamps, pts);
  });
  if (g.trace) out.write("plan_trace.jsonl", [&](std::ostream& os) { write_plan_trace(os, space, plan); });
  write_manifest(out, "plan", config, {s.seed},
                 {{"accumulated_cost", plan.accumulated_cost}, {"degraded_refines", degraded}});

  std::cout << "planned " << plan.cells.size() << " steps, accumulated cost " << num(plan.accumulated_cost, "%.6g")
            << ", yaw sequence (deg):";
  for (double th : plan.theta_sequence) std::cout << ' ' << num(rad_to_deg(th), "%.1f");
  std::cout << '\n';
  return kOk;
}

int cmd_simulate(const GlobalOptions& g) {
  const Config config = resolve_config(g);
  const Scenario& s = config.scenario;
  OutputDir out(g.out_dir);
  RunTrace trace;
  try {
    trace = run_scenario(s);
  } catch (const SafetyViolation& v) {
    const fs::path report = out.write("safety_violation.txt", [&](std::ostream& os) {
      os << v.what() << '\n'
         << "time_s " << num(v.time) << "\ndrone " << v.drone << "\nposition " << num(v.position.x()) << ' '
         << num(v.position.y()) << ' ' << num(v.position.z()) << "\nsigned_distance_m " << num(v.distance) << '\n';
    });
    write_manifest(out, "simulate", config, {s.seed}, {{"status", "safety_violation"}});
    std::cerr << "error: " << v.what() << "\nreport: " << report.string() << '\n';
    return kSafetyViolation;
  }

  out.write("frames.csv", [&](std::ostream& os) { write_frames_csv(os, trace); });
  out.write("skeleton.csv", [&](std::ostream& os) { write_skeleton_csv(os, trace.estimate); });
  out.write("capture.jsonl", [&](std::ostream& os) { write_capture_jsonl(os, trace.reconstruction_input); });
  out.write("ground_truth.jsonl", [&](std::ostream& os) { write_skeleton_jsonl(os, trace.ground_truth); });
  if (g.trace) out.write("trace.jsonl", [&](std::ostream& os) { write_trace_jsonl(os, trace); });
  const json summary = {{"frames", trace.capture.frames.size()},
                        {"total_E_recon", trace.error.total},
                        {"mean_mpjpe_m", trace.error.mean_mpjpe},
                        {"carried_joints", trace.stats.carried_joints},
                        {"min_clearance_m", trace.capture.min_clearance},
                        {"mean_tilt_deg", rad_to_deg(trace.capture.mean_realized_tilt)},
                        {"max_tilt_deg", rad_to_deg(trace.capture.max_realized_tilt)},
                        {"degraded_refines", trace.capture.degraded_refines}};
  out.write("summary.json", [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
  write_manifest(out, "simulate", config, {s.seed}, {{"status", "ok"}});

  std::cout << "frames " << trace.capture.frames.size() << "\ntotal E_recon " << num(trace.error.total, "%.6f")
            << "\nmean MPJPE " << num(trace.error.mean_mpjpe, "%.6f") << " m\n";
  return kOk;
}

int cmd_experiment(const GlobalOptions& g, const std::string& sweep) {
  const Config config = resolve_config(g, sweep == "fixed-vs-adaptive" ? "mound" : "default");
  SweepResult result;
  std::string name;
  if (sweep == "tilt") {
    result = experiment_tilt_sweep(config.scenario, config.sweep);
    name = "tilt_sweep";
  } else if (sweep == "robots") {
    result = experiment_robot_sweep(config.scenario, config.sweep);
    name = "robot_sweep";
  } else {
    result = run_fixed_vs_adaptive(config.scenario, config.sweep);
    name = "fixed_vs_adaptive";
  }
  OutputDir out(g.out_dir);
  out.write(name + ".csv", [&](std::ostream& os) { write_sweep_csv(os, result); });
  out.write(name + "_summary.csv", [&](std::ostream& os) { write_summary_csv(os, result); });
  write_manifest(out, "experiment", config, config.sweep.seed_list(),
                 {{"sweep", sweep}, {"variants", result.variants}, {"noise_levels", config.sweep.noise_levels}});
  write_summary_csv(std::cout, result);
  return kOk;
}

int cmd_reconstruct(const GlobalOptions& g, const std::string& detections, const std::string& ground_truth) {
  std::ifstream in(detections);
  if (!in) throw IoError("cannot open " + detections);
  const std::vector<CaptureFrame> frames = read_capture_jsonl(in);
  std::optional<SkeletonSequence> gt;
  if (!ground_truth.empty()) {
    std::ifstream gin(ground_truth);
    if (!gin) throw IoError("cannot open " + ground_truth);
    gt = read_skeleton_jsonl(gin);
  }
  ReconstructionStats stats;
  const SkeletonSequence est = reconstruct_sequence(frames, kJointCount, &stats);

  OutputDir out(g.out_dir);
  out.write("skeleton.jsonl", [&](std::ostream& os) { write_skeleton_jsonl(os, est); });
  out.write("skeleton.csv", [&](std::ostream& os) { write_skeleton_csv(os, est); });
  json summary = {{"frames", est.size()},
                  {"carried_joints", stats.carried_joints},
                  {"degenerate_joints", stats.degenerate_joints}};
  if (gt) {
    const ReconError err = recon_error(est, *gt);
    summary["total_E_recon"] = err.total;
    summary["mean_mpjpe_m"] = err.mean_mpjpe;
    std::cout << "total E_recon " << num(err.total, "%.6f") << "\nmean MPJPE " << num(err.mean_mpjpe, "%.6f")
              << " m\n";
  }
  out.write("summary.json", [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
  json inputs = {{"detections", detections}};
  if (gt) inputs["ground_truth"] = ground_truth;
  const json m = {{"tool", "aerocap"}, {"version", "0.1.0"}, {"command", "reconstruct"},
                  {"inputs", inputs},  {"outputs", out.written()}};
  out.write("manifest.json", [&](std::ostream& os) { os << m.dump(2) << '\n'; });

  std::cout << "reconstructed " << est.size() << " frames\n";
  if (stats.carried_joints > 0)
    std::cerr << "warning: " << stats.carried_joints << " joints had fewer than two usable views and were carried\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-drone formation planning and human pose capture simulator"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON config document")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Override the scenario seed and sweep base seed");
  app.add_option("--jobs", g.jobs, "Parallel sweep jobs (0 = all cores)");
  app.add_flag("--trace", g.trace, "Also write JSON-lines traces");

  auto* plan = app.add_subcommand("plan", "Run one formation planning cycle");
  auto* simulate = app.add_subcommand("simulate", "Closed-loop capture and reconstruction");
  auto* experiment = app.add_subcommand("experiment", "Parameter sweeps");
  std::string sweep;
  experiment->add_option("--sweep", sweep, "tilt, robots or fixed-vs-adaptive")
      ->required()
      ->check(CLI::IsMember({"tilt", "robots", "fixed-vs-adaptive"}));
  auto* reconstruct = app.add_subcommand("reconstruct", "Offline triangulation of recorded detections");
  std::string detections, ground_truth;
  reconstruct->add_option("detections", detections, "Capture JSON-lines (detections and camera poses)")->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--ground-truth", ground_truth, "Ground-truth skeleton JSON-lines")->check(CLI::ExistingFile);
  for (auto* sub : {plan, simulate, experiment, reconstruct}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*plan) return cmd_plan(g);
    if (*simulate) return cmd_simulate(g);
    if (*experiment) return cmd_experiment(g, sweep);
    if (*reconstruct) return cmd_reconstruct(g, detections, ground_truth);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SafetyViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSafetyViolation;
  } catch (const CaptureFormatError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kIoError;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::runtime_error& e) {
    // Remaining runtime errors come from reading or writing files.
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}
