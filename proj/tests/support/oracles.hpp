#pragma once

// Independent reference implementations used by the unit and acceptance tests.
// Each one is deliberately naive so it shares no code path with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "aerocap/costs.hpp"
#include "aerocap/formation_planner.hpp"
#include "aerocap/occupancy.hpp"
#include "aerocap/skeleton.hpp"

namespace aerocap::oracle {

/// Nearest opposite-class voxel by exhaustive search over every pair.
inline std::vector<double> brute_force_sdf(const OccupancyGrid& g, double threshold, double max_distance) {
  const auto d = g.dims();
  std::vector<std::array<int, 3>> occ, free;
  for (int i = 0; i < d.nx; ++i)
    for (int j = 0; j < d.ny; ++j)
      for (int k = 0; k < d.nz; ++k) (g.at(i, j, k) >= threshold ? occ : free).push_back({i, j, k});
  std::vector<double> out(d.count(), max_distance);
  if (occ.empty()) return out;
  for (int i = 0; i < d.nx; ++i)
    for (int j = 0; j < d.ny; ++j)
      for (int k = 0; k < d.nz; ++k) {
        const bool inside = g.at(i, j, k) >= threshold;
        const auto& others = inside ? free : occ;
        long best = std::numeric_limits<long>::max();
        for (const auto& o : others) {
          const long di = o[0] - i, dj = o[1] - j, dk = o[2] - k;
          best = std::min(best, di * di + dj * dj + dk * dk);
        }
        double v = others.empty() ? max_distance
                                  : std::min(max_distance, std::sqrt(static_cast<double>(best)) * g.voxel_size());
        out[g.index(i, j, k)] = inside ? -v : v;
      }
  return out;
}

inline double formation_sum(const TrajectorySet& a, const TrajectorySet& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.drones.size(); ++i)
    for (std::size_t t = 0; t < a.timestamps.size(); ++t) {
      const double dx = a.drones[i][t].x() - b.drones[i][t].x();
      const double dy = a.drones[i][t].y() - b.drones[i][t].y();
      const double dz = a.drones[i][t].z() - b.drones[i][t].z();
      s += std::sqrt(dx * dx + dy * dy + dz * dz);
    }
  return s;
}

inline double smoothness_sum(const TrajectorySet& a) {
  double s = 0.0;
  const double dt = a.timestamps[1] - a.timestamps[0];
  for (const auto& p : a.drones)
    for (std::size_t t = 1; t + 1 < p.size(); ++t)
      for (int c = 0; c < 3; ++c) {
        const double acc = p[t + 1][c] - 2.0 * p[t][c] + p[t - 1][c];
        s += acc * acc / (dt * dt * dt * dt);
      }
  return s;
}

inline double recon_total(const SkeletonSequence& est, const SkeletonSequence& gt) {
  double s = 0.0;
  for (std::size_t f = 0; f < est.frames.size(); ++f)
    for (std::size_t j = 0; j < est.frames[f].joints.size(); ++j)
      for (int c = 0; c < 3; ++c) {
        const double e = est.frames[f].joints[j][c] - gt.frames[f].joints[j][c];
        s += e * e;
      }
  return s;
}

/// Minimum of sum C[t][cell_t] over every sequence whose first cell is within
/// `radius` of `start` and whose consecutive cells are within `radius`.
inline double exhaustive_min_cost(const Eigen::MatrixXd& c, int start, int radius) {
  const int steps = static_cast<int>(c.rows()), d = static_cast<int>(c.cols());
  auto dist = [d](int a, int b) {
    const int m = std::abs(a - b) % d;
    return std::min(m, d - m);
  };
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> seq(steps, 0);
  std::function<void(int, int, double)> rec = [&](int t, int prev, double acc) {
    if (t == steps) {
      best = std::min(best, acc);
      return;
    }
    for (int k = 0; k < d; ++k)
      if (dist(prev, k) <= radius) rec(t + 1, k, acc + c(t, k));
  };
  rec(0, start, 0.0);
  return best;
}

/// Central finite-difference gradient of f at x.
inline std::vector<Vec3> numeric_gradient(const std::function<double(const std::vector<Vec3>&)>& f,
                                          std::vector<Vec3> x, double h) {
  std::vector<Vec3> g(x.size(), Vec3::Zero());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int c = 0; c < 3; ++c) {
      const double orig = x[i][c];
      x[i][c] = orig + h;
      const double fp = f(x);
      x[i][c] = orig - h;
      const double fm = f(x);
      x[i][c] = orig;
      g[i][c] = (fp - fm) / (2.0 * h);
    }
  return g;
}

/// max |a - b| / max(|b|, floor) over all components.
inline double relative_error(const std::vector<Vec3>& a, const std::vector<Vec3>& b, double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, (a[i] - b[i]).norm() / std::max(b[i].norm(), floor));
  return worst;
}

}  // namespace aerocap::oracle
