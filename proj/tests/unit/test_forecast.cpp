#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "aerocap/forecast.hpp"

using namespace aerocap;

namespace {

ActorState moving(const Vec3& p, const Vec3& v, double var = 1.0) {
  ActorState s;
  s.position = p;
  s.velocity = v;
  s.covariance = var * Matrix6::Identity();
  return s;
}

double min_eigenvalue(const Matrix6& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix6>(m).eigenvalues().minCoeff();
}

}  // namespace

TEST(KalmanPredict, ConstantVelocity) {
  const ActorState s = kf_predict(moving(Vec3::Zero(), Vec3(1, 0, 0)), 1.0, 1.0);
  EXPECT_EQ(s.position, Vec3(1, 0, 0));
  EXPECT_EQ(s.velocity, Vec3(1, 0, 0));
  const ActorState still = kf_predict(moving(Vec3(3, 4, 5), Vec3::Zero()), 7.5, 1.0);
  EXPECT_EQ(still.position, Vec3(3, 4, 5));
}

TEST(KalmanPredict, TraceGrowsWithProcessNoise) {
  const ActorState a = moving(Vec3::Zero(), Vec3::Zero(), 0.1);
  EXPECT_GT(kf_predict(a, 0.5, 1.0).covariance.trace(), a.covariance.trace());
}

TEST(KalmanPredict, RejectsNonPositiveDt) {
  EXPECT_THROW(kf_predict(moving(Vec3::Zero(), Vec3::Zero()), 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(kf_predict(moving(Vec3::Zero(), Vec3::Zero()), -1.0, 1.0), InvalidArgument);
}

TEST(KalmanUpdate, ScalarPosteriorVariance) {
  // Prior variance 1 and observation variance 1 give 1 * 1 / (1 + 1).
  const ActorState s = kf_update(moving(Vec3::Zero(), Vec3::Zero(), 1.0), Vec3::Zero(), 1.0);
  EXPECT_NEAR(s.covariance(0, 0), 0.5, 1e-15);
}

TEST(KalmanUpdate, ObservationAtPredictionKeepsMean) {
  const ActorState prior = moving(Vec3(1, 2, 3), Vec3(0.5, 0, 0), 2.0);
  const ActorState s = kf_update(prior, Vec3(1, 2, 3), 0.09);
  EXPECT_EQ(s.position, prior.position);
  EXPECT_LT(s.covariance.trace(), prior.covariance.trace());
}

TEST(KalmanUpdate, TinyNoiseSnapsToObservation) {
  const ActorState s = kf_update(moving(Vec3::Zero(), Vec3::Zero()), Vec3(4, -2, 1), 1e-14);
  EXPECT_NEAR((s.position - Vec3(4, -2, 1)).norm(), 0.0, 1e-9);
}

TEST(KalmanUpdate, PositionBlockShrinksInLoewnerOrder) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 1);
  Eigen::Matrix<double, 6, 6> a;
  for (int i = 0; i < 36; ++i) a(i / 6, i % 6) = n(rng);
  ActorState prior = moving(Vec3::Zero(), Vec3::Zero());
  prior.covariance = a * a.transpose() + 0.1 * Matrix6::Identity();
  const ActorState post = kf_update(prior, Vec3(1, 1, 1), 0.3);
  const Eigen::Matrix3d diff = prior.covariance.block<3, 3>(0, 0) - post.covariance.block<3, 3>(0, 0);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(diff).eigenvalues().minCoeff(), -1e-9);
}

TEST(KalmanUpdate, RejectsBadInput) {
  const ActorState s = moving(Vec3::Zero(), Vec3::Zero());
  EXPECT_THROW(kf_update(s, Vec3(std::nan(""), 0, 0), 1.0), InvalidArgument);
  EXPECT_THROW(kf_update(s, Vec3::Zero(), 0.0), InvalidArgument);
}

TEST(Kalman, CovarianceStaysSymmetricPsd) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  ActorTracker tracker({1.0, 0.3});
  for (int k = 0; k < 500; ++k) {
    tracker.observe(0.1 * k, Vec3(n(rng), n(rng), n(rng)));
    const Matrix6& P = tracker.state().covariance;
    ASSERT_LT((P - P.transpose()).cwiseAbs().maxCoeff(), 1e-9);
    ASSERT_GE(min_eigenvalue(P), -1e-9);
  }
}

TEST(Forecast, WaypointGrid) {
  const ActorPath p = forecast_path(moving(Vec3::Zero(), Vec3(1, 0, 0)), 10.0, 2.0, 3.0);
  ASSERT_EQ(p.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(p.timestamps[k], 3.0 + 2.0 * static_cast<double>(k));
    EXPECT_NEAR((p.positions[k] - Vec3(2.0 * k, 0, 0)).norm(), 0.0, 1e-12);
  }
}

TEST(Forecast, ZeroVelocityIsConstant) {
  const ActorPath p = forecast_path(moving(Vec3(1, 2, 3), Vec3::Zero()), 10.0, 0.5);
  EXPECT_EQ(p.size(), 21u);
  for (const auto& q : p.positions) EXPECT_EQ(q, Vec3(1, 2, 3));
}

TEST(Forecast, RejectsBadHorizon) {
  EXPECT_THROW(forecast_path(moving(Vec3::Zero(), Vec3::Zero()), 1.0, 2.0), InvalidArgument);
  EXPECT_THROW(forecast_path(moving(Vec3::Zero(), Vec3::Zero()), 1.0, 0.0), InvalidArgument);
}

TEST(Forecast, NoiselessLinearWalkerConverges) {
  const Vec3 p0(2, -1, 0.95), v(1.5, 0.5, 0);
  ActorState s = moving(Vec3::Zero(), Vec3::Zero(), 100.0);
  double prev_err = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 10; ++k) {
    const double t = 0.1 * k;
    if (k > 0) s = kf_predict(s, 0.1, 0.0);
    s = kf_update(s, p0 + t * v, 1e-12);
    const double err = (s.position - (p0 + t * v)).norm() + (s.velocity - v).norm();
    if (k >= 2) {
      EXPECT_LE(err, prev_err + 1e-12);
    }
    prev_err = err;
  }
  const ActorPath path = forecast_path(s, 10.0, 2.0, 0.9);
  for (std::size_t k = 0; k < path.size(); ++k)
    EXPECT_LT((path.positions[k] - (p0 + path.timestamps[k] * v)).norm(), 1e-6);
}

TEST(Tracker, FollowsWalkerWithinHalfMetre) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0, 0.3);
  ActorTracker tracker;
  double worst = 0.0;
  for (int k = 0; k < 600; ++k) {
    const double t = 0.1 * k;
    const Vec3 truth(1.5 * t, 0, 0.95);
    tracker.observe(t, truth + Vec3(n(rng), n(rng), n(rng)));
    if (k > 20) worst = std::max(worst, (tracker.state().position - truth).norm());
  }
  EXPECT_LT(worst, 0.5);
}
