#include <benchmark/benchmark.h>

#include "pfc/estimator.hpp"
#include "pfc/eval.hpp"
#include "pfc/rng.hpp"
#include "pfc/sim.hpp"

using namespace pfc;

namespace {

Simulator make_sim() {
  Surface s{0.0, Vec2::Zero(), 0.5};
  BodyState b = resting_pose(Vec2(0.05, 0.025), 0.1, s);
  return Simulator(b, s, SimConfig{});
}

}  // namespace

static void BM_ClassifyMode(benchmark::State& state) {
  Simulator sim = make_sim();
  PolyhedralCone cone = sim.ground_truth_cone();
  Rng rng(3);
  std::vector<Wrench> samples;
  for (int i = 0; i < 256; ++i)
    samples.push_back(Wrench{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-0.3, 0.3)});
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_mode(cone, samples[i++ & 255]));
  }
}
BENCHMARK(BM_ClassifyMode);

static void BM_SimStep(benchmark::State& state) {
  Simulator sim = make_sim();
  const Wrench cmd{0.4, -0.8, 0.01};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim.apply_command(cmd));
  }
}
BENCHMARK(BM_SimStep);

static void BM_MetricV(benchmark::State& state) {
  Simulator sim = make_sim();
  PolyhedralCone truth = sim.ground_truth_cone();
  PolyhedralCone est = truth;
  for (Vec3& e : est.edges) e = (e + 0.05 * truth.axis()).normalized();
  for (auto _ : state) benchmark::DoNotOptimize(metric_v(est, truth));
}
BENCHMARK(BM_MetricV);

static void BM_EstimateUpdate(benchmark::State& state) {
  Rng rng(9);
  std::vector<Vec3> samples;
  for (int i = 0; i < 24; ++i)
    samples.push_back(Vec3(rng.uniform(-1, 1), rng.uniform(1, 2), rng.uniform(-1, 1)));
  std::vector<Vec3> w;
  for (const Vec3& s : samples) w = update_estimate(w, s, 2.0);
  const Vec3 next(0.9, 1.1, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_estimate(w, next, 2.0));
  }
}
BENCHMARK(BM_EstimateUpdate);

BENCHMARK_MAIN();
