#include "aerocap/forecast.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace aerocap {

ActorPath ActorPath::slice(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw InvalidArgument("actor path slice out of range");
  ActorPath out;
  out.timestamps.assign(timestamps.begin() + first, timestamps.begin() + first + count);
  out.positions.assign(positions.begin() + first, positions.begin() + first + count);
  return out;
}

Vec3 ActorPath::position_at(double t) const {
  if (positions.empty()) throw InvalidArgument("empty actor path");
  if (t <= timestamps.front()) return positions.front();
  if (t >= timestamps.back()) return positions.back();
  const auto it = std::upper_bound(timestamps.begin(), timestamps.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - timestamps.begin());
  const double a = (t - timestamps[i - 1]) / (timestamps[i] - timestamps[i - 1]);
  return (1.0 - a) * positions[i - 1] + a * positions[i];
}

ActorState kf_predict(const ActorState& state, double dt, double accel_variance) {
  if (!(dt > 0.0)) throw InvalidArgument("kf_predict: dt must be positive");
  if (!(accel_variance >= 0.0)) throw InvalidArgument("kf_predict: process noise must be >= 0");

  Matrix6 F = Matrix6::Identity();
  F.block<3, 3>(0, 3) = dt * Eigen::Matrix3d::Identity();

  const double dt2 = dt * dt;
  Matrix6 Q = Matrix6::Zero();
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  Q.block<3, 3>(0, 0) = 0.25 * dt2 * dt2 * I;
  Q.block<3, 3>(0, 3) = 0.5 * dt2 * dt * I;
  Q.block<3, 3>(3, 0) = 0.5 * dt2 * dt * I;
  Q.block<3, 3>(3, 3) = dt2 * I;
  Q *= accel_variance;

  ActorState out;
  out.position = state.position + dt * state.velocity;
  out.velocity = state.velocity;
  out.covariance = F * state.covariance * F.transpose() + Q;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

ActorState kf_update(const ActorState& state, const Vec3& observation, double obs_variance) {
  if (!(obs_variance > 0.0)) throw InvalidArgument("kf_update: observation noise must be positive");
  if (!observation.allFinite()) throw InvalidArgument("kf_update: non-finite observation");

  Eigen::Matrix<double, 3, 6> H = Eigen::Matrix<double, 3, 6>::Zero();
  H.block<3, 3>(0, 0) = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d R = obs_variance * Eigen::Matrix3d::Identity();

  const Matrix6& P = state.covariance;
  const Eigen::Matrix3d S = H * P * H.transpose() + R;
  const Eigen::Matrix<double, 6, 3> K = P * H.transpose() * S.ldlt().solve(Eigen::Matrix3d::Identity());

  Eigen::Matrix<double, 6, 1> x;
  x << state.position, state.velocity;
  x += K * (observation - state.position);

  const Matrix6 IKH = Matrix6::Identity() - K * H;
  ActorState out;
  out.position = x.head<3>();
  out.velocity = x.tail<3>();
  out.covariance = IKH * P * IKH.transpose() + K * R * K.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

ActorPath forecast_path(const ActorState& state, double horizon, double dt, double t0) {
  if (!(dt > 0.0) || !(horizon >= dt)) throw InvalidArgument("forecast_path: need horizon >= dt > 0");
  const auto steps = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
  ActorPath path;
  path.timestamps.reserve(steps + 1);
  path.positions.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double offset = static_cast<double>(k) * dt;
    path.timestamps.push_back(t0 + offset);
    path.positions.push_back(state.position + offset * state.velocity);
  }
  return path;
}

void ActorTracker::observe(double t, const Vec3& observation) {
  const double r = params_.position_sigma * params_.position_sigma;
  if (!initialized_) {
    state_.position = observation;
    state_.velocity.setZero();
    state_.covariance.setZero();
    state_.covariance.block<3, 3>(0, 0) = r * Eigen::Matrix3d::Identity();
    // Walking-speed prior on velocity.
    state_.covariance.block<3, 3>(3, 3) = 4.0 * Eigen::Matrix3d::Identity();
    time_ = t;
    initialized_ = true;
    return;
  }
  const double dt = t - time_;
  ActorState predicted = dt > 0.0 ? kf_predict(state_, dt, params_.accel_sigma * params_.accel_sigma) : state_;
  state_ = kf_update(predicted, observation, r);
  time_ = t;
}

}  // namespace aerocap
