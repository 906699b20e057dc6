#include <benchmark/benchmark.h>

#include <random>

#include "salmanip/image_ops.hpp"
#include "salmanip/pipeline.hpp"
#include "salmanip/poisson.hpp"
#include "salmanip/saliency.hpp"
#include "salmanip/synthesis.hpp"

namespace {

using namespace salmanip;

RgbImage noise_rgb(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  RgbImage img(w, h);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(rng() % 256);
  return img;
}

// Smooth gradient plus noise, so patches are neither flat nor all distinct.
RgbImage textured_rgb(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t* p = img.pixel(x, y);
      p[0] = static_cast<std::uint8_t>((x * 255) / w * 3 / 4 + rng() % 64);
      p[1] = static_cast<std::uint8_t>((y * 255) / h * 3 / 4 + rng() % 64);
      p[2] = static_cast<std::uint8_t>(128 + rng() % 64);
    }
  }
  return img;
}

void BM_NnSearch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LabImage target = rgb_to_lab(textured_rgb(n, n, 1));
  PatchDatabase db;
  db.source = rgb_to_lab(textured_rgb(n, n, 2));
  db.valid = Mask(n, n, true);
  const Mask all(n, n, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn_search(target, all, db, {}, 0).total_distance());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_NnSearch)->Arg(64)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_ScreenedPoisson(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LabImage a = rgb_to_lab(noise_rgb(n, n, 3));
  const LabImage b = rgb_to_lab(textured_rgb(n, n, 4));
  const ScreenedPoissonProblem problem{a, gradients(b), 5.0};
  for (auto _ : state) benchmark::DoNotOptimize(solve_screened_poisson(problem));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_ScreenedPoisson)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Saliency(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LabImage img = rgb_to_lab(textured_rgb(n, n, 5));
  for (auto _ : state) benchmark::DoNotOptimize(compute_saliency(img));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Saliency)->Arg(150)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Enhance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RgbImage img = textured_rgb(n, n, 6);
  Mask region(n, n);
  for (int y = n / 3; y < 2 * n / 3; ++y) {
    for (int x = n / 3; x < 2 * n / 3; ++x) region.set(x, y, true);
  }
  ManipulationConfig cfg;
  cfg.max_db_iterations = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_manipulation(img, region, Mode::kEnhance, cfg).report);
  }
}
BENCHMARK(BM_Enhance)->Arg(256)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
