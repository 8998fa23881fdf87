#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "aerocap/costs.hpp"
#include "aerocap/forecast.hpp"
#include "aerocap/occupancy.hpp"

namespace aerocap {

/// T x D grid of formation yaw states with per-state cost C and cost-to-go V.
/// Row t is the t-th planned step; cell k has yaw -pi + k*2pi/D.
struct YawStateSpace {
  Eigen::MatrixXd cost;
  Eigen::MatrixXd cost_to_go;
  int neighbor_radius = 1;

  YawStateSpace() = default;
  YawStateSpace(Eigen::MatrixXd cost_map, int neighbor_radius);

  int steps() const { return static_cast<int>(cost.rows()); }
  int yaw_cells() const { return static_cast<int>(cost.cols()); }
  double yaw_of(int cell) const;
  /// Nearest cell to a continuous yaw.
  int cell_of(double theta) const;
  /// Modular index distance between two cells.
  int cell_distance(int a, int b) const;
  bool are_neighbors(int a, int b) const { return cell_distance(a, b) <= neighbor_radius; }
};

struct FormationPlannerParams {
  CostGridParams grid;
  int neighbor_radius = 1;
  double horizon = 10.0;     // s
  double dt = 2.0;           // s between coarse waypoints
  double clearance = 2.0;    // m of signed distance required at a formation slot
};

/// Optimal formation yaw sequence over the horizon. Index 0 of `timestamps`,
/// `theta_sequence` and `targets` is the anchor at the initial yaw; indices
/// 1..T are the planned steps.
struct FormationPlan {
  double theta0 = 0.0;
  int start_cell = 0;
  std::vector<int> cells;              // T planned cells
  std::vector<double> timestamps;      // T + 1
  std::vector<double> theta_sequence;  // T + 1
  TrajectorySet targets;               // T + 1 waypoints per drone
  double accumulated_cost = 0.0;       // sum of C along the chosen cells
};

/// C[t][k] = w.occlusion*occlusion + w.obstacle*obstacle + w.formation*deviation
/// for the whole formation placed at yaw cell k at planned step t. The
/// deviation of a slot is the distance its placement must be lifted to clear
/// obstacles by `params.clearance`.
YawStateSpace build_cost_map(const SphericalCostGrid& grid, const WorldModel& world,
                             const ActorPath& actor_path, const FormationSpec& spec,
                             const FormationPlannerParams& params = {});

/// Bellman recursion V[T-1] = C[T-1], V[t][k] = C[t][k] + min_{k' in N(k)} V[t+1][k'].
YawStateSpace backward_pass(YawStateSpace space);

/// Greedy descent of V from the cell nearest theta0. Ties prefer the smallest
/// yaw change from theta0 (or the previous step), then the smallest index.
std::vector<int> forward_pass(const YawStateSpace& space, double theta0);

/// Sum of C over a cell sequence (one cell per step).
double path_cost(const YawStateSpace& space, const std::vector<int>& cells);

/// Full planning cycle: forecast, spherical grid, cost map, backward and forward
/// passes. When `space_out` is set, the solved state space is copied there.
FormationPlan plan_formation(const WorldModel& world, const ActorState& actor_state,
                             const FormationSpec& spec, double theta0,
                             const FormationPlannerParams& params = {}, double t0 = 0.0,
                             YawStateSpace* space_out = nullptr);

/// One JSON object per planned step: {"step","t","cell","theta","C":[...],"V":[...]}.
void write_plan_trace(std::ostream& os, const YawStateSpace& space, const FormationPlan& plan);

}  // namespace aerocap
