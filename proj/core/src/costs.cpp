#include "aerocap/costs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aerocap {

namespace {

int cube_root_exact(int k) {
  for (int m = 1; m * m * m <= k; ++m)
    if (m * m * m == k) return m;
  return 0;
}

struct Direction {
  double theta;
  double phi;
};

// Azimuth/elevation of p around c; the origin maps to (0, 0).
Direction direction_of(const Vec3& c, const Vec3& p) {
  const Vec3 d = p - c;
  return {std::atan2(d.y(), d.x()), std::atan2(d.z(), std::hypot(d.x(), d.y()))};
}

void check_same_shape(const TrajectorySet& a, const TrajectorySet& b) {
  if (a.num_drones() != b.num_drones()) throw InvalidArgument("trajectory sets differ in drone count");
  for (std::size_t i = 0; i < a.num_drones(); ++i)
    if (a.drones[i].size() != b.drones[i].size())
      throw InvalidArgument("trajectory sets differ in step count for drone " + std::to_string(i));
}

}  // namespace

double formation_yaw_spacing(int n) {
  if (n < 2) throw InvalidArgument("formation needs at least two drones");
  return n == 2 ? kPi / 2.0 : kTwoPi / n;
}

void FormationSpec::validate() const {
  if (n < 2) throw InvalidArgument("formation.n must be >= 2");
  if (!(rho_form > 0.0)) throw InvalidArgument("formation.rho must be positive");
  if (!(r_max >= rho_form)) throw InvalidArgument("formation.r_max must be >= rho");
  if (!(phi_form >= -kPi / 2 && phi_form <= kPi / 2)) throw InvalidArgument("formation.phi out of range");
  if (weights.occlusion < 0.0 || weights.obstacle < 0.0 || weights.formation < 0.0)
    throw InvalidArgument("cost weights must be non-negative");
}

void CostGridParams::validate() const {
  if (yaw_cells < 4) throw InvalidArgument("yaw_cells must be >= 4");
  if (tilt_cells < 1 || range_cells < 1) throw InvalidArgument("tilt_cells and range_cells must be >= 1");
  if (cube_root_exact(samples_per_cell) == 0)
    throw InvalidArgument("samples_per_cell must be a perfect cube");
  if (quadrature_samples < 1) throw InvalidArgument("quadrature_samples must be >= 1");
}

std::vector<std::vector<double>> TrajectorySet::headings(const ActorPath& actor_path) const {
  std::vector<std::vector<double>> out(num_drones());
  for (std::size_t i = 0; i < num_drones(); ++i) {
    if (drones[i].size() != actor_path.size()) throw InvalidArgument("headings: timestamp grids differ");
    out[i].reserve(drones[i].size());
    for (std::size_t t = 0; t < drones[i].size(); ++t) {
      const Vec3 d = actor_path.positions[t] - drones[i][t];
      out[i].push_back(wrap_angle(std::atan2(d.y(), d.x())));
    }
  }
  return out;
}

TrajectorySet formation_targets(const ActorPath& actor_path, const FormationSpec& spec,
                                const std::vector<double>& theta_form) {
  if (theta_form.size() != actor_path.size())
    throw InvalidArgument("formation_targets: theta_form length must match the actor path");
  const double spacing = spec.delta_theta();
  TrajectorySet set;
  set.timestamps = actor_path.timestamps;
  set.drones.assign(spec.n, {});
  for (int i = 0; i < spec.n; ++i) {
    set.drones[i].reserve(actor_path.size());
    for (std::size_t t = 0; t < actor_path.size(); ++t) {
      const SphericalCoord s{spec.rho_form, wrap_angle(theta_form[t] + i * spacing), spec.phi_form};
      set.drones[i].push_back(spherical_to_world(actor_path.positions[t], s));
    }
  }
  return set;
}

Placement lift_placement(const WorldModel& world, const Vec3& actor_pos, const SphericalCoord& s,
                         double clearance, double max_occlusion, int quadrature_samples) {
  const double step = deg_to_rad(1.0);
  const double max_phi = deg_to_rad(89.0);
  Placement best;
  for (double phi = s.phi;; phi += step) {
    phi = std::min(phi, max_phi);
    const Vec3 p = spherical_to_world(actor_pos, {s.rho, s.theta, phi});
    const bool clear = world.sdf.distance_at(p) >= clearance;
    const bool visible =
        max_occlusion >= 1.0 || segment_occlusion(world.grid, p, actor_pos, quadrature_samples) < max_occlusion;
    if (clear && visible) return {p, phi, true};
    if (phi >= max_phi) {
      best = {p, phi, false};
      break;
    }
  }
  return best;
}

SphericalCostGrid::SphericalCostGrid(std::vector<Vec3> centers, int yaw_cells, int tilt_cells,
                                     int range_cells, double r_max)
    : centers_(std::move(centers)),
      yaw_cells_(yaw_cells),
      tilt_cells_(tilt_cells),
      range_cells_(range_cells),
      r_max_(r_max),
      values_(centers_.size() * yaw_cells * tilt_cells * range_cells, 0.0) {}

int SphericalCostGrid::yaw_cell(double theta) const {
  const double u = (wrap_angle(theta) + kPi) / yaw_step();
  const int k = static_cast<int>(std::lround(u));
  return ((k % yaw_cells_) + yaw_cells_) % yaw_cells_;
}

int SphericalCostGrid::tilt_cell(double phi) const {
  const int j = static_cast<int>(std::floor((phi + kPi / 2.0) / tilt_step()));
  return std::clamp(j, 0, tilt_cells_ - 1);
}

double SphericalCostGrid::cell_volume(int tilt, int range) const {
  const double p0 = -kPi / 2.0 + tilt * tilt_step();
  const double p1 = p0 + tilt_step();
  const double r0 = range * range_step();
  const double r1 = r0 + range_step();
  return yaw_step() * (std::sin(p1) - std::sin(p0)) * (r1 * r1 * r1 - r0 * r0 * r0) / 3.0;
}

double SphericalCostGrid::column_cost(std::size_t t, int yaw, int tilt) const {
  double sum = 0.0;
  for (int r = 0; r < range_cells_; ++r) sum += at(t, yaw, tilt, r) * cell_volume(tilt, r);
  return sum;
}

SphericalCostGrid build_spherical_grid(const WorldModel& world, const ActorPath& actor_path,
                                       const FormationSpec& spec, const CostGridParams& params) {
  params.validate();
  SphericalCostGrid grid(actor_path.positions, params.yaw_cells, params.tilt_cells, params.range_cells,
                         spec.r_max);
  const int m = cube_root_exact(params.samples_per_cell);
  const double inv = 1.0 / params.samples_per_cell;
  const double dth = grid.yaw_step(), dph = grid.tilt_step(), dr = grid.range_step();

  for (std::size_t t = 0; t < grid.steps(); ++t) {
    const Vec3& c = grid.center(t);
    for (int k = 0; k < params.yaw_cells; ++k) {
      const double th0 = -kPi + (k - 0.5) * dth;
      for (int j = 0; j < params.tilt_cells; ++j) {
        const double ph0 = -kPi / 2.0 + j * dph;
        for (int r = 0; r < params.range_cells; ++r) {
          const double r0 = r * dr;
          double sum = 0.0;
          for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
              for (int e = 0; e < m; ++e) {
                const SphericalCoord s{r0 + (e + 0.5) * dr / m, th0 + (a + 0.5) * dth / m,
                                       ph0 + (b + 0.5) * dph / m};
                sum += world.grid.occupancy_at(spherical_to_world(c, s));
              }
          grid.at(t, k, j, r) = sum * inv;
        }
      }
    }
  }
  return grid;
}

double cost_formation(const TrajectorySet& traj, const TrajectorySet& targets) {
  check_same_shape(traj, targets);
  double sum = 0.0;
  for (std::size_t i = 0; i < traj.num_drones(); ++i)
    for (std::size_t t = 0; t < traj.drones[i].size(); ++t)
      sum += (traj.drones[i][t] - targets.drones[i][t]).norm();
  return sum;
}

double cost_obstacle(const SphericalCostGrid& grid, const TrajectorySet& traj, const FormationSpec& spec) {
  (void)spec;
  double sum = 0.0;
  for (const auto& drone : traj.drones) {
    if (drone.size() != grid.steps()) throw InvalidArgument("cost_obstacle: step count differs from grid");
    for (std::size_t t = 0; t < drone.size(); ++t) {
      const Direction d = direction_of(grid.center(t), drone[t]);
      sum += grid.column_cost(t, grid.yaw_cell(d.theta), grid.tilt_cell(d.phi));
    }
  }
  return sum;
}

double segment_occlusion(const OccupancyGrid& grid, const Vec3& camera, const Vec3& actor,
                         int quadrature_samples, Vec3* grad) {
  if (quadrature_samples < 1) throw InvalidArgument("quadrature_samples must be >= 1");
  const double inv = 1.0 / quadrature_samples;
  double sum = 0.0;
  Vec3 g = Vec3::Zero();
  Vec3 gs;
  for (int q = 0; q < quadrature_samples; ++q) {
    const double tau = (q + 0.5) * inv;
    const Vec3 p = tau * camera + (1.0 - tau) * actor;
    if (grad) {
      sum += grid.occupancy_with_gradient(p, &gs);
      g += tau * gs;
    } else {
      sum += grid.occupancy_at(p);
    }
  }
  if (grad) *grad = g * inv;
  return sum * inv;
}

double cost_occlusion(const WorldModel& world, const TrajectorySet& traj, const ActorPath& actor_path,
                      int quadrature_samples) {
  double sum = 0.0;
  for (const auto& drone : traj.drones) {
    if (drone.size() != actor_path.size()) throw InvalidArgument("cost_occlusion: timestamp grids differ");
    for (std::size_t t = 0; t < drone.size(); ++t)
      sum += segment_occlusion(world.grid, drone[t], actor_path.positions[t], quadrature_samples);
  }
  return sum;
}

double cost_smoothness(const TrajectorySet& traj, bool* too_short) {
  if (too_short) *too_short = false;
  if (traj.num_steps() < 3) {
    if (too_short) *too_short = true;
    return 0.0;
  }
  const double dt = traj.timestamps[1] - traj.timestamps[0];
  if (!(dt > 0.0)) throw InvalidArgument("cost_smoothness: timestamps must increase");
  const double inv_dt4 = 1.0 / (dt * dt * dt * dt);
  double sum = 0.0;
  for (const auto& drone : traj.drones)
    for (std::size_t t = 1; t + 1 < drone.size(); ++t)
      sum += (drone[t + 1] - 2.0 * drone[t] + drone[t - 1]).squaredNorm() * inv_dt4;
  return sum;
}

double total_cost(const CostComponents& c, const CostWeights& w) {
  if (w.occlusion < 0.0 || w.obstacle < 0.0 || w.formation < 0.0)
    throw InvalidArgument("total_cost: negative weight");
  if (c.smoothness < 0.0 || c.occlusion < 0.0 || c.obstacle < 0.0 || c.formation < 0.0)
    throw InvalidArgument("total_cost: negative component");
  return c.smoothness + w.occlusion * c.occlusion + w.obstacle * c.obstacle + w.formation * c.formation;
}

}  // namespace aerocap
