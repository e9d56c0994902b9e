// Parallel binned rasterizer against the serial all-pairs reference.

#include <benchmark/benchmark.h>

#include <random>

#include "gsimg/densifier.hpp"
#include "gsimg/parallel.hpp"
#include "gsimg/rasterizer.hpp"

namespace {

using namespace gsimg;

// Random cloud with footprints of a few pixels, roughly what a trained
// representation looks like.
GaussianCloud make_cloud(std::size_t n, ImageDims dims) {
  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GaussianCloud cloud(CovarianceVariant::Direct, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 + 6.0 * u(rng), b = 2.0 + 6.0 * u(rng);
    const double xy = (u(rng) - 0.5) * std::sqrt(a * b);
    cloud.append({{u(rng) * dims.width, u(rng) * dims.height},
                  {a, xy, b},
                  {u(rng), u(rng), u(rng)},
                  0.5});
  }
  return cloud;
}

ImagePlane make_upstream(ImageDims dims) {
  ImagePlane d(dims);
  Rng rng(11);
  std::normal_distribution<double> n(0.0, 1e-4);
  for (double& v : d.data()) v = n(rng);
  return d;
}

void BM_Render(benchmark::State& state) {
  const ImageDims dims{static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  const auto cloud = make_cloud(static_cast<std::size_t>(state.range(1)), dims);
  set_worker_count(static_cast<int>(state.range(2)));
  for (auto _ : state) benchmark::DoNotOptimize(render(cloud, dims));
  set_worker_count(0);
}

void BM_RenderNaive(benchmark::State& state) {
  const ImageDims dims{static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  const auto cloud = make_cloud(static_cast<std::size_t>(state.range(1)), dims);
  for (auto _ : state) benchmark::DoNotOptimize(render_naive(cloud, dims));
}

void BM_Backward(benchmark::State& state) {
  const ImageDims dims{static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  const auto cloud = make_cloud(static_cast<std::size_t>(state.range(1)), dims);
  const auto upstream = make_upstream(dims);
  set_worker_count(static_cast<int>(state.range(2)));
  for (auto _ : state) benchmark::DoNotOptimize(render_backward(cloud, dims, upstream));
  set_worker_count(0);
}

void BM_BackwardNaive(benchmark::State& state) {
  const ImageDims dims{static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  const auto cloud = make_cloud(static_cast<std::size_t>(state.range(1)), dims);
  const auto upstream = make_upstream(dims);
  for (auto _ : state) benchmark::DoNotOptimize(render_backward_naive(cloud, dims, upstream));
}

// Args: side, primitives, workers (0 = OpenMP default).
BENCHMARK(BM_Render)->Args({128, 2000, 1})->Args({128, 2000, 0})->Args({512, 5000, 0})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenderNaive)->Args({128, 2000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Backward)->Args({128, 2000, 1})->Args({128, 2000, 0})->Args({512, 5000, 0})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BackwardNaive)->Args({128, 2000})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
