#include <random>

#include <benchmark/benchmark.h>

#include "aerocap/capture.hpp"
#include "aerocap/formation_planner.hpp"
#include "aerocap/local_planner.hpp"

using namespace aerocap;

namespace {

WorldModel bench_world(int n) {
  OccupancyGrid g(Vec3(-n / 2.0, -n / 2.0, -4), 1.0, {n, n, n});
  g.fill_box(Vec3(6, -4, -4), Vec3(12, 4, 14), 1.0);
  g.fill_box(Vec3(-15, 8, -4), Vec3(-9, 20, 8), 1.0);
  return make_world(std::move(g));
}

ActorState walker() {
  ActorState s;
  s.position = Vec3(0, 0, kPelvisHeight);
  s.velocity = Vec3(1.5, 0, 0);
  s.covariance = 0.01 * Matrix6::Identity();
  return s;
}

void BM_PlanningCycle(benchmark::State& state) {
  const WorldModel world = bench_world(static_cast<int>(state.range(0)));
  const ActorState actor = walker();
  FormationSpec spec;
  spec.n = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(plan_formation(world, actor, spec, 0.0));
}
BENCHMARK(BM_PlanningCycle)->Args({64, 2})->Args({64, 5})->Unit(benchmark::kMillisecond);

void BM_SdfBuild(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  OccupancyGrid g(Vec3::Zero(), 1.0, {n, n, n});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) g.set(i, j, k, u(rng) < 0.05 ? 1.0 : 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(sdf_from_grid(g));
}
BENCHMARK(BM_SdfBuild)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Refine(benchmark::State& state) {
  const WorldModel world = bench_world(64);
  const FormationPlan plan = plan_formation(world, walker(), FormationSpec{}, 0.0);
  const FineTrajectory target = upsample_plan(plan, 0, 0.5);
  const FineTrajectory peer = upsample_plan(plan, 1, 0.5);
  ActorPath actor;
  actor.timestamps = target.timestamps;
  for (double t : target.timestamps) actor.positions.push_back(Vec3(1.5 * t, 0, kPelvisHeight));
  FineTrajectory start = target;
  for (auto& p : start.points) p += Vec3(0.5, -0.5, 0.3);
  start.points.front() = target.points.front();
  for (auto _ : state) benchmark::DoNotOptimize(refine(start, world, actor, target, {peer}));
}
BENCHMARK(BM_Refine)->Unit(benchmark::kMillisecond);

void BM_Triangulate(benchmark::State& state) {
  const int views = static_cast<int>(state.range(0));
  const Vec3 p(0.2, -0.1, 1.1);
  std::vector<Observation> obs;
  for (int v = 0; v < views; ++v) {
    const double a = kTwoPi * v / views;
    const Pose pose = look_at(Vec3(10 * std::cos(a), 10 * std::sin(a), 3.7), Vec3(0, 0, 1));
    obs.push_back({pose, CameraIntrinsics{}, *project(pose, CameraIntrinsics{}, p)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(triangulate(obs));
}
BENCHMARK(BM_Triangulate)->Arg(2)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
