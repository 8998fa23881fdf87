#pragma once

#include <cstddef>
#include <vector>

#include "aerocap/forecast.hpp"
#include "aerocap/geometry.hpp"
#include "aerocap/occupancy.hpp"

namespace aerocap {

/// Relative weights of the occlusion, obstacle and formation terms; the
/// smoothness term carries unit weight.
struct CostWeights {
  double occlusion = 5.0;
  double obstacle = 10.0;
  double formation = 1.0;
};

/// Yaw spacing between neighbouring drones in an n-drone formation: pi/2 for
/// two drones, 2*pi/n otherwise.
double formation_yaw_spacing(int n);

struct FormationSpec {
  int n = 2;
  double rho_form = 10.0;
  double phi_form = deg_to_rad(15.0);
  double r_max = 12.0;
  CostWeights weights;

  double delta_theta() const { return formation_yaw_spacing(n); }
  /// Throws InvalidArgument on n < 2, non-positive radius, r_max < rho_form or
  /// negative weights.
  void validate() const;
};

/// Discretization of the spherical cost grid and of the line integrals.
struct CostGridParams {
  int yaw_cells = 8;
  int tilt_cells = 4;
  int range_cells = 8;
  int samples_per_cell = 8;  // must be a perfect cube
  int quadrature_samples = 32;

  void validate() const;
};

/// Per-drone waypoints on a shared time grid.
struct TrajectorySet {
  std::vector<double> timestamps;
  std::vector<std::vector<Vec3>> drones;

  std::size_t num_drones() const { return drones.size(); }
  std::size_t num_steps() const { return timestamps.size(); }
  /// Heading of every waypoint toward the actor at the same timestamp.
  std::vector<std::vector<double>> headings(const ActorPath& actor_path) const;
};

/// Drone i at time t sits at spherical (rho_form, theta_form[t] + i*delta_theta,
/// phi_form) around the actor.
TrajectorySet formation_targets(const ActorPath& actor_path, const FormationSpec& spec,
                                const std::vector<double>& theta_form);

/// Result of lifting a camera placement out of obstacles by raising its tilt.
struct Placement {
  Vec3 position = Vec3::Zero();
  double phi = 0.0;
  bool feasible = true;
};

/// Smallest tilt >= s.phi (1 degree steps, capped below 90 degrees) whose
/// position has at least `clearance` metres of signed distance and, when
/// `max_occlusion` < 1, an occlusion integral to the actor below it.
Placement lift_placement(const WorldModel& world, const Vec3& actor_pos, const SphericalCoord& s,
                         double clearance, double max_occlusion = 1.0, int quadrature_samples = 32);

/// Time-dependent spherical occupancy around the forecast actor. Yaw cell k is
/// centred at -pi + k*2pi/D; tilt spans [-pi/2, pi/2]; range spans [0, r_max].
class SphericalCostGrid {
 public:
  SphericalCostGrid() = default;
  SphericalCostGrid(std::vector<Vec3> centers, int yaw_cells, int tilt_cells, int range_cells,
                    double r_max);

  std::size_t steps() const { return centers_.size(); }
  int yaw_cells() const { return yaw_cells_; }
  int tilt_cells() const { return tilt_cells_; }
  int range_cells() const { return range_cells_; }
  double r_max() const { return r_max_; }
  const Vec3& center(std::size_t t) const { return centers_[t]; }

  double& at(std::size_t t, int yaw, int tilt, int range) { return values_[index(t, yaw, tilt, range)]; }
  double at(std::size_t t, int yaw, int tilt, int range) const { return values_[index(t, yaw, tilt, range)]; }

  int yaw_cell(double theta) const;
  int tilt_cell(double phi) const;
  double yaw_step() const { return kTwoPi / yaw_cells_; }
  double tilt_step() const { return kPi / tilt_cells_; }
  double range_step() const { return r_max_ / range_cells_; }

  /// Exact volume of cell (tilt, range) for one yaw cell.
  double cell_volume(int tilt, int range) const;

  /// Sum over the radial column at (yaw, tilt) of occupancy times cell volume.
  double column_cost(std::size_t t, int yaw, int tilt) const;

 private:
  std::size_t index(std::size_t t, int yaw, int tilt, int range) const {
    return ((t * yaw_cells_ + yaw) * tilt_cells_ + tilt) * range_cells_ + range;
  }

  std::vector<Vec3> centers_;
  int yaw_cells_ = 0;
  int tilt_cells_ = 0;
  int range_cells_ = 0;
  double r_max_ = 0.0;
  std::vector<double> values_;
};

/// Mean Cartesian occupancy of stratified samples inside each spherical cell.
SphericalCostGrid build_spherical_grid(const WorldModel& world, const ActorPath& actor_path,
                                       const FormationSpec& spec, const CostGridParams& params = {});

/// Sum over drones and steps of ||waypoint - target||.
double cost_formation(const TrajectorySet& traj, const TrajectorySet& targets);

/// Sum over drones and steps of the radial column cost at each drone's direction.
double cost_obstacle(const SphericalCostGrid& grid, const TrajectorySet& traj, const FormationSpec& spec);

/// Midpoint-rule estimate of the mean occupancy along the segment from `actor`
/// to `camera`. With `grad`, also the derivative w.r.t. the camera endpoint.
double segment_occlusion(const OccupancyGrid& grid, const Vec3& camera, const Vec3& actor,
                         int quadrature_samples, Vec3* grad = nullptr);

double cost_occlusion(const WorldModel& world, const TrajectorySet& traj, const ActorPath& actor_path,
                      int quadrature_samples = 32);

/// Sum over drones of squared second differences divided by dt^4. Fewer than
/// three steps yields 0 and sets *too_short.
double cost_smoothness(const TrajectorySet& traj, bool* too_short = nullptr);

struct CostComponents {
  double smoothness = 0.0;
  double occlusion = 0.0;
  double obstacle = 0.0;
  double formation = 0.0;
};

/// smoothness + w.occlusion*occlusion + w.obstacle*obstacle + w.formation*formation.
double total_cost(const CostComponents& components, const CostWeights& weights);

}  // namespace aerocap
