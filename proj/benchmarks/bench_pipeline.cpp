#include <benchmark/benchmark.h>

#include <random>

#include "lidarsynth/annotator.hpp"
#include "lidarsynth/lidar.hpp"
#include "lidarsynth/render.hpp"

using namespace lidarsynth;

namespace {

const Camera& camera() {
  static const Camera c = Camera::dataset_default();
  return c;
}

const Scene& street() {
  static const Scene s = make_random_scene(1);
  return s;
}

const RenderedFrame& frame() {
  static const RenderedFrame f = render(street(), camera(), 0);
  return f;
}

void BM_DecodeDepth(benchmark::State& state) {
  const Camera& c = camera();
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> u(0, c.width() - 1), v(0, c.height() - 1);
  const Pixel px{u(rng), v(rng)};
  const DepthBuffer& depth = frame().depth;  // render outside the timed loop
  for (auto _ : state) benchmark::DoNotOptimize(decode_depth(px, depth, c));
}
BENCHMARK(BM_DecodeDepth);

void BM_RaycastExact(benchmark::State& state) {
  const Vec3 d = make_ray(0.1, -0.05);
  for (auto _ : state) benchmark::DoNotOptimize(raycast_exact(street(), d));
}
BENCHMARK(BM_RaycastExact);

void BM_Render(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(render(street(), camera(), int(state.range(0))));
}
BENCHMARK(BM_Render)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_Scan(benchmark::State& state) {
  LidarConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        generate_point_cloud(frame().depth, frame().instance, camera(), cfg, int(state.range(0))));
  }
}
BENCHMARK(BM_Scan)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_Segment(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(segment_instances(frame().depth, frame().stencil, camera(), street()));
  }
}
BENCHMARK(BM_Segment)->Unit(benchmark::kMillisecond);

void BM_Labels(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(make_labels(street(), camera(), frame().instance));
}
BENCHMARK(BM_Labels)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
