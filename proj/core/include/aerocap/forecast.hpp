#pragma once

#include <vector>

#include <Eigen/Core>

#include "aerocap/geometry.hpp"

namespace aerocap {

using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Constant-velocity actor state: [position; velocity] with joint covariance.
struct ActorState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Matrix6 covariance = Matrix6::Identity();
};

/// Actor positions on a uniform time grid.
struct ActorPath {
  std::vector<double> timestamps;
  std::vector<Vec3> positions;

  std::size_t size() const { return positions.size(); }
  /// Copy of the samples [first, first + count).
  ActorPath slice(std::size_t first, std::size_t count) const;
  /// Linear interpolation in time, clamped at both ends.
  Vec3 position_at(double t) const;
};

struct KalmanParams {
  double accel_sigma = 1.0;    // m/s^2, white-acceleration process noise
  double position_sigma = 0.3;  // m, observation noise
};

/// Propagates the mean along the constant-velocity model and the covariance with
/// white-acceleration noise of variance `accel_variance`.
ActorState kf_predict(const ActorState& state, double dt, double accel_variance);

/// Position-only measurement update (Joseph form).
ActorState kf_update(const ActorState& state, const Vec3& observation, double obs_variance);

/// floor(horizon/dt)+1 samples of the mean state extrapolated at constant velocity,
/// stamped t0 + k*dt.
ActorPath forecast_path(const ActorState& state, double horizon, double dt, double t0 = 0.0);

/// Filter wrapper used by the simulator: initializes on the first observation.
class ActorTracker {
 public:
  explicit ActorTracker(KalmanParams params = {}) : params_(params) {}

  void observe(double t, const Vec3& observation);
  bool initialized() const { return initialized_; }
  const ActorState& state() const { return state_; }
  double time() const { return time_; }

 private:
  KalmanParams params_;
  ActorState state_;
  double time_ = 0.0;
  bool initialized_ = false;
};

}  // namespace aerocap
