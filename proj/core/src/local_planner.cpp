#include "aerocap/local_planner.hpp"

#include <algorithm>
#include <cmath>

namespace aerocap {

namespace {

bool has(LocalTerm mask, LocalTerm term) {
  return (static_cast<unsigned>(mask) & static_cast<unsigned>(term)) != 0u;
}

}  // namespace

Vec3 FineTrajectory::position_at(double t) const {
  if (points.empty()) throw InvalidArgument("empty trajectory");
  if (t <= timestamps.front()) return points.front();
  if (t >= timestamps.back()) return points.back();
  const auto it = std::upper_bound(timestamps.begin(), timestamps.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - timestamps.begin());
  const double a = (t - timestamps[i - 1]) / (timestamps[i] - timestamps[i - 1]);
  return (1.0 - a) * points[i - 1] + a * points[i];
}

FineTrajectory upsample(const std::vector<double>& timestamps, const std::vector<Vec3>& points,
                        double dt_fine) {
  if (timestamps.size() != points.size() || timestamps.size() < 2)
    throw InvalidArgument("upsample: need at least two stamped points");
  if (!(dt_fine > 0.0)) throw InvalidArgument("upsample: dt_fine must be positive");
  FineTrajectory coarse{timestamps, points};
  const double t0 = timestamps.front();
  const double span = timestamps.back() - t0;
  const auto steps = static_cast<std::size_t>(std::floor(span / dt_fine + 1e-9));
  FineTrajectory fine;
  fine.timestamps.reserve(steps + 1);
  fine.points.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt_fine;
    fine.timestamps.push_back(t);
    fine.points.push_back(coarse.position_at(t));
  }
  return fine;
}

FineTrajectory upsample_plan(const FormationPlan& coarse, int drone_index, double dt_fine) {
  if (drone_index < 0 || static_cast<std::size_t>(drone_index) >= coarse.targets.num_drones())
    throw InvalidArgument("upsample_plan: drone index out of range");
  return upsample(coarse.targets.timestamps, coarse.targets.drones[drone_index], dt_fine);
}

double separation_cost(const FineTrajectory& traj, const PeerForecast& peers, double d_min) {
  double sum = 0.0;
  for (const auto& peer : peers) {
    if (peer.size() != traj.size()) throw InvalidArgument("separation_cost: peer grid differs");
    for (std::size_t t = 0; t < traj.size(); ++t) {
      const double gap = d_min - (traj.points[t] - peer.points[t]).norm();
      if (gap > 0.0) sum += gap * gap;
    }
  }
  return sum;
}

LocalObjective::LocalObjective(const WorldModel& world, const ActorPath& actor_path,
                               const FineTrajectory& target, const PeerForecast& peers,
                               const LocalPlannerParams& params)
    : world_(world), actor_path_(actor_path), target_(target), peers_(peers), params_(params) {
  if (target.size() < 2) throw InvalidArgument("local objective: target needs two or more points");
  if (actor_path.size() != target.size()) throw InvalidArgument("local objective: actor path grid differs");
  for (const auto& p : peers)
    if (p.size() != target.size()) throw InvalidArgument("local objective: peer grid differs");
  dt_ = target.timestamps[1] - target.timestamps[0];
  if (!(dt_ > 0.0)) throw InvalidArgument("local objective: timestamps must increase");
}

double LocalObjective::evaluate(const std::vector<Vec3>& pts, std::vector<Vec3>* grad,
                                LocalCostTerms* terms, LocalTerm mask) const {
  const std::size_t n = pts.size();
  if (n != target_.size()) throw InvalidArgument("local objective: point count differs");
  if (grad) grad->assign(n, Vec3::Zero());
  const CostWeights& w = params_.weights;
  LocalCostTerms t;

  if (has(mask, LocalTerm::kSmoothness) && n >= 3) {
    const double inv_dt4 = 1.0 / std::pow(dt_, 4);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const Vec3 r = pts[i + 1] - 2.0 * pts[i] + pts[i - 1];
      t.smoothness += r.squaredNorm() * inv_dt4;
      if (grad) {
        const Vec3 g = 2.0 * r * inv_dt4;
        (*grad)[i + 1] += g;
        (*grad)[i] -= 2.0 * g;
        (*grad)[i - 1] += g;
      }
    }
  }

  Vec3 g;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& p = pts[i];
    if (has(mask, LocalTerm::kOcclusion)) {
      t.occlusion += segment_occlusion(world_.grid, p, actor_path_.positions[i], params_.quadrature_samples,
                                       grad ? &g : nullptr);
      if (grad) (*grad)[i] += w.occlusion * g;
    }
    if (has(mask, LocalTerm::kObstacle)) {
      const double d = world_.sdf.distance_with_gradient(p, grad ? &g : nullptr);
      const double gap = params_.clearance - d;
      if (gap > 0.0) {
        t.obstacle += gap * gap;
        if (grad) (*grad)[i] += w.obstacle * (-2.0 * gap) * g;
      }
    }
    if (has(mask, LocalTerm::kFormation)) {
      const Vec3 e = p - target_.points[i];
      t.formation += e.squaredNorm();
      if (grad) (*grad)[i] += w.formation * 2.0 * e;
    }
    if (has(mask, LocalTerm::kSeparation)) {
      for (const auto& peer : peers_) {
        const Vec3 diff = p - peer.points[i];
        const double dist = diff.norm();
        const double gap = params_.min_separation - dist;
        if (gap <= 0.0) continue;
        t.separation += gap * gap;
        if (grad && dist > 0.0) (*grad)[i] += params_.separation_weight * (-2.0 * gap / dist) * diff;
      }
    }
  }

  if (terms) *terms = t;
  return t.smoothness + w.occlusion * t.occlusion + w.obstacle * t.obstacle + w.formation * t.formation +
         params_.separation_weight * t.separation;
}

Eigen::MatrixXd smoothness_metric(int num_points, double dt) {
  const int m = num_points - 1;
  if (m < 1) throw InvalidArgument("smoothness_metric: need at least two points");
  // Row r is the second difference centred at waypoint r, written over the
  // free waypoints x_j = p_{j+1}; p_{-1} = p_0 encodes zero initial velocity.
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  for (int r = 0; r < m; ++r) {
    K(r, r) = 1.0;
    if (r >= 1) K(r, r - 1) = -2.0;
    if (r >= 2) K(r, r - 2) = 1.0;
  }
  return K.transpose() * K / std::pow(dt, 4);
}

RefineResult refine(const FineTrajectory& traj, const WorldModel& world, const ActorPath& actor_path,
                    const FineTrajectory& target, const PeerForecast& peers, const LocalPlannerParams& params) {
  if (traj.size() != target.size()) throw InvalidArgument("refine: trajectory and target grids differ");
  const LocalObjective objective(world, actor_path, target, peers, params);

  RefineResult result;
  result.trajectory = traj;
  std::vector<Vec3>& x = result.trajectory.points;
  const int n = static_cast<int>(x.size());
  const int m = n - 1;

  std::vector<Vec3> grad;
  double cost = objective.evaluate(x, &grad);
  result.initial_cost = cost;
  result.cost_history.push_back(cost);

  Eigen::LLT<Eigen::MatrixXd> metric;
  if (params.covariant && m >= 1) metric.compute(smoothness_metric(n, objective.dt()));

  Eigen::MatrixXd g(m, 3), step(m, 3);
  std::vector<Vec3> candidate(x.size()), cand_grad;
  for (int it = 0; it < params.max_iters && m >= 1; ++it) {
    for (int j = 0; j < m; ++j) g.row(j) = grad[j + 1].transpose();
    if (g.norm() < 1e-12) break;
    step = params.covariant ? Eigen::MatrixXd(metric.solve(g)) : g;

    double alpha = 1.0 / params.eta;
    bool accepted = false;
    double cand_cost = cost;
    for (int b = 0; b <= params.max_backtracks; ++b, alpha *= 0.5) {
      candidate[0] = x[0];
      for (int j = 0; j < m; ++j) candidate[j + 1] = x[j + 1] - alpha * step.row(j).transpose();
      cand_cost = objective.evaluate(candidate, &cand_grad);
      if (cand_cost < cost) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.degraded = true;
      break;
    }
    const double rel = (cost - cand_cost) / std::max(cost, 1e-12);
    x.swap(candidate);
    grad.swap(cand_grad);
    cost = cand_cost;
    result.cost_history.push_back(cost);
    result.iterations = it + 1;
    if (rel < params.relative_tolerance) break;
  }
  result.final_cost = cost;
  return result;
}

}  // namespace aerocap
