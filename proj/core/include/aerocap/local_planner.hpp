#pragma once

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "aerocap/costs.hpp"
#include "aerocap/formation_planner.hpp"
#include "aerocap/occupancy.hpp"

namespace aerocap {

/// Uniformly spaced waypoints of one drone. The first waypoint is the drone's
/// current position and is never moved by refinement.
struct FineTrajectory {
  std::vector<double> timestamps;
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
  /// Linear interpolation, clamped at both ends.
  Vec3 position_at(double t) const;
};

/// Expected fine waypoints of every other drone on the same time grid.
using PeerForecast = std::vector<FineTrajectory>;

/// Linear interpolation of `points` (stamped `timestamps`) onto a dt_fine grid
/// covering the same interval. Endpoints are preserved.
FineTrajectory upsample(const std::vector<double>& timestamps, const std::vector<Vec3>& points,
                        double dt_fine = 0.5);
FineTrajectory upsample_plan(const FormationPlan& coarse, int drone_index, double dt_fine = 0.5);

/// Sum over time and peers of max(0, d_min - distance)^2.
double separation_cost(const FineTrajectory& traj, const PeerForecast& peers, double d_min = 3.0);

struct LocalPlannerParams {
  CostWeights weights;
  double clearance = 2.0;            // m, SDF hinge onset
  double separation_weight = 100.0;
  double min_separation = 3.0;       // m
  double eta = 10.0;                 // step size is 1/eta
  int max_iters = 50;
  int max_backtracks = 8;
  double relative_tolerance = 1e-4;
  int quadrature_samples = 32;
  bool covariant = true;             // precondition with the smoothness metric
};

/// Unweighted value of each objective term.
struct LocalCostTerms {
  double smoothness = 0.0;
  double occlusion = 0.0;
  double obstacle = 0.0;
  double formation = 0.0;
  double separation = 0.0;
};

enum class LocalTerm : unsigned {
  kSmoothness = 1u << 0,
  kOcclusion = 1u << 1,
  kObstacle = 1u << 2,
  kFormation = 1u << 3,
  kSeparation = 1u << 4,
  kAll = 0x1fu,
};

/// U = smoothness + w.occ*occlusion + w.obs*sum max(0, clearance - d)^2
///     + w.form*sum ||p - target||^2 + w_sep*separation.
/// Keeps a reference to `world`; the other inputs are copied.
class LocalObjective {
 public:
  LocalObjective(const WorldModel& world, const ActorPath& actor_path, const FineTrajectory& target,
                 const PeerForecast& peers, const LocalPlannerParams& params);

  /// Weighted objective restricted to the terms in `mask`. `grad`, when given,
  /// receives dU/dp for every waypoint (the fixed start included).
  double evaluate(const std::vector<Vec3>& points, std::vector<Vec3>* grad = nullptr,
                  LocalCostTerms* terms = nullptr, LocalTerm mask = LocalTerm::kAll) const;

  double dt() const { return dt_; }

 private:
  const WorldModel& world_;
  ActorPath actor_path_;
  FineTrajectory target_;
  PeerForecast peers_;
  LocalPlannerParams params_;
  double dt_ = 0.5;
};

/// Second-difference metric over the free waypoints 1..N-1 with the start
/// fixed and zero initial velocity, scaled by 1/dt^4. Positive definite.
Eigen::MatrixXd smoothness_metric(int num_points, double dt);

struct RefineResult {
  FineTrajectory trajectory;
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  bool degraded = false;
  std::vector<double> cost_history;  // accepted iterates
};

/// Covariant gradient descent xi <- xi - (1/eta) A^-1 grad U with backtracking.
RefineResult refine(const FineTrajectory& traj, const WorldModel& world, const ActorPath& actor_path,
                    const FineTrajectory& target, const PeerForecast& peers,
                    const LocalPlannerParams& params = {});

}  // namespace aerocap
