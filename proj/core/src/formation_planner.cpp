#include "aerocap/formation_planner.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

namespace aerocap {

YawStateSpace::YawStateSpace(Eigen::MatrixXd cost_map, int radius)
    : cost(std::move(cost_map)), neighbor_radius(radius) {
  if (cost.rows() < 1 || cost.cols() < 1) throw InvalidArgument("cost map must be non-empty");
  if (radius < 1) throw InvalidArgument("neighbor_radius must be >= 1");
  cost_to_go = Eigen::MatrixXd::Zero(cost.rows(), cost.cols());
}

double YawStateSpace::yaw_of(int cell) const { return -kPi + cell * (kTwoPi / yaw_cells()); }

int YawStateSpace::cell_of(double theta) const {
  const int d = yaw_cells();
  const int k = static_cast<int>(std::lround((wrap_angle(theta) + kPi) / (kTwoPi / d)));
  return ((k % d) + d) % d;
}

int YawStateSpace::cell_distance(int a, int b) const {
  const int d = yaw_cells();
  const int diff = std::abs(a - b) % d;
  return std::min(diff, d - diff);
}

YawStateSpace build_cost_map(const SphericalCostGrid& grid, const WorldModel& world,
                             const ActorPath& actor_path, const FormationSpec& spec,
                             const FormationPlannerParams& params) {
  spec.validate();
  if (grid.steps() != actor_path.size()) throw InvalidArgument("build_cost_map: grid/path step mismatch");
  const int steps = static_cast<int>(grid.steps());
  const int cells = grid.yaw_cells();
  const double spacing = spec.delta_theta();
  const CostWeights& w = spec.weights;

  Eigen::MatrixXd cost(steps, cells);
  for (int t = 0; t < steps; ++t) {
    const Vec3& actor = actor_path.positions[t];
    for (int k = 0; k < cells; ++k) {
      const double theta = -kPi + k * grid.yaw_step();
      double occlusion = 0.0, obstacle = 0.0, deviation = 0.0;
      for (int i = 0; i < spec.n; ++i) {
        const SphericalCoord slot{spec.rho_form, wrap_angle(theta + i * spacing), spec.phi_form};
        const Vec3 ideal = spherical_to_world(actor, slot);
        occlusion += segment_occlusion(world.grid, ideal, actor, params.grid.quadrature_samples);
        obstacle += grid.column_cost(t, grid.yaw_cell(slot.theta), grid.tilt_cell(slot.phi));
        const Placement lifted = lift_placement(world, actor, slot, params.clearance);
        deviation += (lifted.position - ideal).norm();
      }
      cost(t, k) = w.occlusion * occlusion + w.obstacle * obstacle + w.formation * deviation;
    }
  }
  return YawStateSpace(std::move(cost), params.neighbor_radius);
}

YawStateSpace backward_pass(YawStateSpace space) {
  const int steps = space.steps();
  const int cells = space.yaw_cells();
  space.cost_to_go.resize(steps, cells);
  space.cost_to_go.row(steps - 1) = space.cost.row(steps - 1);
  for (int t = steps - 2; t >= 0; --t) {
    for (int k = 0; k < cells; ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (int off = -space.neighbor_radius; off <= space.neighbor_radius; ++off) {
        const int nk = ((k + off) % cells + cells) % cells;
        best = std::min(best, space.cost_to_go(t + 1, nk));
      }
      space.cost_to_go(t, k) = space.cost(t, k) + best;
    }
  }
  return space;
}

std::vector<int> forward_pass(const YawStateSpace& space, double theta0) {
  const int cells = space.yaw_cells();
  std::vector<int> path;
  path.reserve(space.steps());
  int current = space.cell_of(theta0);
  double yaw = theta0;
  for (int t = 0; t < space.steps(); ++t) {
    int best = -1;
    for (int k = 0; k < cells; ++k) {
      if (!space.are_neighbors(current, k)) continue;
      if (best < 0) {
        best = k;
        continue;
      }
      const double vk = space.cost_to_go(t, k);
      const double vb = space.cost_to_go(t, best);
      if (vk < vb) {
        best = k;
      } else if (vk == vb) {
        // Measured from the continuous yaw so a formation already turning keeps its direction.
        const double dk = std::abs(angle_diff(space.yaw_of(k), yaw));
        const double db = std::abs(angle_diff(space.yaw_of(best), yaw));
        if (dk < db - 1e-12) best = k;  // equal change keeps the smaller index
      }
    }
    path.push_back(best);
    current = best;
    yaw = space.yaw_of(best);
  }
  return path;
}

double path_cost(const YawStateSpace& space, const std::vector<int>& cells) {
  if (static_cast<int>(cells.size()) != space.steps()) throw InvalidArgument("path_cost: length mismatch");
  double sum = 0.0;
  for (int t = 0; t < space.steps(); ++t) sum += space.cost(t, cells[t]);
  return sum;
}

FormationPlan plan_formation(const WorldModel& world, const ActorState& actor_state,
                             const FormationSpec& spec, double theta0,
                             const FormationPlannerParams& params, double t0, YawStateSpace* space_out) {
  const ActorPath full = forecast_path(actor_state, params.horizon, params.dt, t0);
  if (full.size() < 2) throw InvalidArgument("plan: horizon/dt must yield at least two waypoints");
  const ActorPath planned = full.slice(1, full.size() - 1);

  const SphericalCostGrid grid = build_spherical_grid(world, planned, spec, params.grid);
  YawStateSpace space = backward_pass(build_cost_map(grid, world, planned, spec, params));

  FormationPlan plan;
  plan.theta0 = wrap_angle(theta0);
  plan.start_cell = space.cell_of(theta0);
  plan.cells = forward_pass(space, theta0);
  plan.accumulated_cost = path_cost(space, plan.cells);
  plan.timestamps = full.timestamps;
  plan.theta_sequence.reserve(full.size());
  plan.theta_sequence.push_back(plan.theta0);
  for (int c : plan.cells) plan.theta_sequence.push_back(space.yaw_of(c));

  plan.targets = formation_targets(full, spec, plan.theta_sequence);
  for (int i = 0; i < spec.n; ++i)
    for (std::size_t t = 0; t < full.size(); ++t) {
      const Vec3& actor = full.positions[t];
      const SphericalCoord slot{spec.rho_form, wrap_angle(plan.theta_sequence[t] + i * spec.delta_theta()),
                                spec.phi_form};
      plan.targets.drones[i][t] = lift_placement(world, actor, slot, params.clearance).position;
    }

  if (space_out) *space_out = std::move(space);
  return plan;
}

void write_plan_trace(std::ostream& os, const YawStateSpace& space, const FormationPlan& plan) {
  for (int t = 0; t < space.steps(); ++t) {
    nlohmann::json line;
    line["step"] = t + 1;
    line["t"] = plan.timestamps.size() > static_cast<std::size_t>(t + 1) ? plan.timestamps[t + 1] : 0.0;
    line["cell"] = plan.cells[t];
    line["theta"] = plan.theta_sequence[t + 1];
    std::vector<double> c(space.yaw_cells()), v(space.yaw_cells());
    for (int k = 0; k < space.yaw_cells(); ++k) {
      c[k] = space.cost(t, k);
      v[k] = space.cost_to_go(t, k);
    }
    line["C"] = c;
    line["V"] = v;
    os << line.dump() << '\n';
  }
}

}  // namespace aerocap
