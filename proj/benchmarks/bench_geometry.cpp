#include <benchmark/benchmark.h>

#include "pfc/geometry.hpp"
#include "pfc/rng.hpp"

using namespace pfc;

namespace {

std::vector<Vec3> random_points(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i)
    pts.push_back(Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
  return pts;
}

}  // namespace

static void BM_ConvexHull3D(benchmark::State& state) {
  auto pts = random_points(static_cast<int>(state.range(0)), 42);
  for (auto _ : state) {
    ConvexPolytope hull = convex_hull_3d(pts);
    benchmark::DoNotOptimize(hull.vertices.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConvexHull3D)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_ClipPolytope(benchmark::State& state) {
  ConvexPolytope p = convex_hull_3d(random_points(static_cast<int>(state.range(0)), 7));
  Plane h{Vec3(0.3, 0.5, 0.81).normalized(), Vec3(0.05, -0.02, 0.01)};
  for (auto _ : state) {
    ConvexPolytope c = clip_polytope(p, h);
    benchmark::DoNotOptimize(c.vertices.data());
  }
}
BENCHMARK(BM_ClipPolytope)->Arg(16)->Arg(64)->Arg(256);

static void BM_PolytopeVolume(benchmark::State& state) {
  ConvexPolytope p = convex_hull_3d(random_points(256, 11));
  for (auto _ : state) benchmark::DoNotOptimize(polytope_volume(p));
}
BENCHMARK(BM_PolytopeVolume);
