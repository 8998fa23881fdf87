#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "aerocap/experiments.hpp"

using namespace aerocap;

namespace {

Scenario short_scenario() {
  Scenario s = default_scenario();
  s.duration = 2.0;
  return s;
}

}  // namespace

TEST(SweepOptions, SeedsAndValidation) {
  SweepOptions o;
  o.base_seed = 10;
  o.seeds = 3;
  EXPECT_EQ(o.seed_list(), (std::vector<std::uint64_t>{10, 11, 12}));
  o.seeds = 0;
  EXPECT_THROW(o.validate(), InvalidArgument);
  o = SweepOptions{};
  o.noise_levels = {-0.1};
  EXPECT_THROW(o.validate(), InvalidArgument);
}

TEST(Sweep, RowOrderSummaryAndThreadIndependence) {
  std::vector<SweepVariant> variants{{"a", short_scenario()}, {"b", short_scenario()}};
  variants[1].scenario.formation.phi_form = deg_to_rad(40);
  SweepOptions opts;
  opts.noise_levels = {0.0, 0.3};
  opts.seeds = 2;
  opts.jobs = 1;
  const SweepResult serial = run_sweep("variant", variants, opts);
  opts.jobs = 4;
  const SweepResult parallel = run_sweep("variant", variants, opts);

  ASSERT_EQ(serial.rows.size(), 8u);
  EXPECT_EQ(serial.rows[0].variant, "a");
  EXPECT_EQ(serial.rows[2].noise_sigma, 0.3);
  EXPECT_EQ(serial.rows[3].seed, 2u);
  EXPECT_EQ(serial.rows[4].variant, "b");
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    EXPECT_EQ(serial.rows[i].total_error, parallel.rows[i].total_error);
    EXPECT_EQ(serial.rows[i].mean_tilt, parallel.rows[i].mean_tilt);
  }

  const SweepSummary& cell = serial.cell("b", 0.3);
  const double m = 0.5 * (serial.rows[6].mean_mpjpe + serial.rows[7].mean_mpjpe);
  EXPECT_EQ(cell.runs, 2);
  EXPECT_NEAR(cell.mpjpe_mean, m, 1e-15);
  EXPECT_NEAR(cell.mpjpe_std, std::abs(serial.rows[6].mean_mpjpe - serial.rows[7].mean_mpjpe) / std::sqrt(2.0),
              1e-15);
  EXPECT_GT(cell.tilt_mean, serial.cell("a", 0.3).tilt_mean);
  EXPECT_THROW(serial.cell("c", 0.0), InvalidArgument);

  std::ostringstream csv, summary;
  write_sweep_csv(csv, serial);
  write_summary_csv(summary, serial);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')),
            "variant,noise_sigma_m,seed,total_E_recon,mean_mpjpe_m,mean_tilt_deg,max_tilt_deg,min_clearance_m,"
            "carried_joints");
  EXPECT_EQ(std::ranges::count(summary.str(), '\n'), 5);
}

TEST(Sweep, ExperimentLabels) {
  SweepOptions opts;
  opts.noise_levels = {0.0};
  opts.seeds = 1;
  Scenario base = short_scenario();
  base.duration = 1.0;
  const SweepResult tilt = experiment_tilt_sweep(base, opts);
  EXPECT_EQ(tilt.parameter, "tilt_deg");
  EXPECT_EQ(tilt.variants, (std::vector<std::string>{"0", "15", "30", "45", "60"}));
  const SweepResult robots = experiment_robot_sweep(base, opts);
  EXPECT_EQ(robots.variants, (std::vector<std::string>{"2", "3", "4", "5"}));
}
