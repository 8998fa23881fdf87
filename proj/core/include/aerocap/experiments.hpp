#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aerocap/simulator.hpp"

namespace aerocap {

struct SweepOptions {
  std::vector<double> noise_levels = {0.0, 0.1, 0.25, 0.5};  // m, camera position sigma
  int seeds = 5;
  std::uint64_t base_seed = 1;  // run i uses base_seed + i
  int jobs = 0;                 // 0 = hardware concurrency

  std::vector<std::uint64_t> seed_list() const;
  void validate() const;
};

/// One (variant, noise level, seed) cell.
struct SweepRow {
  std::string variant;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  double total_error = 0.0;  // sum of squared joint errors over the run
  double mean_mpjpe = 0.0;   // m
  double mean_tilt = 0.0;    // rad, realized
  double max_tilt = 0.0;     // rad, realized
  double min_clearance = 0.0;
  std::size_t carried_joints = 0;
};

struct SweepSummary {
  std::string variant;
  double noise_sigma = 0.0;
  int runs = 0;
  double mpjpe_mean = 0.0;
  double mpjpe_std = 0.0;  // sample standard deviation
  double total_mean = 0.0;
  double total_std = 0.0;
  double tilt_mean = 0.0;  // rad
  double tilt_max = 0.0;   // rad
};

struct SweepResult {
  std::string parameter;  // CSV name of the swept column
  std::vector<std::string> variants;
  std::vector<SweepRow> rows;  // sorted by variant order, noise, seed
  std::vector<SweepSummary> summary;

  const SweepSummary& cell(const std::string& variant, double noise_sigma) const;
};

struct SweepVariant {
  std::string label;
  Scenario scenario;
};

/// Runs every variant for every seed (one closed-loop capture each) and
/// reconstructs it at every noise level. Jobs run on `opts.jobs` threads; rows
/// come back in a fixed order regardless of scheduling.
SweepResult run_sweep(const std::string& parameter, const std::vector<SweepVariant>& variants,
                      const SweepOptions& opts);

/// Formation tilt in {0, 15, 30, 45, 60} degrees.
SweepResult experiment_tilt_sweep(const Scenario& base, const SweepOptions& opts);
/// n in {2, 3, 4, 5} drones at 15 degrees of tilt.
SweepResult experiment_robot_sweep(const Scenario& base, const SweepOptions& opts);
/// Adaptive yaw planning against a frozen yaw that only climbs over obstacles.
SweepResult run_fixed_vs_adaptive(const Scenario& base, const SweepOptions& opts);

/// Per-run table: <parameter>,noise_sigma_m,seed,total_E_recon,mean_mpjpe_m,
/// mean_tilt_deg,max_tilt_deg,min_clearance_m,carried_joints.
void write_sweep_csv(std::ostream& os, const SweepResult& result);
/// <parameter>,noise_sigma_m,runs,mean_mpjpe_m,std_mpjpe_m,mean_E_recon,std_E_recon,mean_tilt_deg,max_tilt_deg.
void write_summary_csv(std::ostream& os, const SweepResult& result);

}  // namespace aerocap
