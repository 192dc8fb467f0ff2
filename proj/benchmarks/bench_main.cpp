#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "share/chamfer.hpp"
#include "share/kdtree.hpp"
#include "share/optimizer.hpp"
#include "share/pipeline.hpp"
#include "share/scene.hpp"
#include "share/synth.hpp"

namespace {

using share::Vec3;

std::vector<Vec3> cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec3> out(n);
  for (auto& p : out) p = Vec3(u(rng), u(rng), u(rng));
  return out;
}

void BM_KdTreeBuild(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    share::KdTree tree(pts);
    benchmark::DoNotOptimize(tree);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdTreeBuild)->RangeMultiplier(8)->Range(512, 32768);

void BM_KdTreeQuery(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)), 2);
  const auto queries = cloud(1024, 3);
  const share::KdTree tree(pts);
  for (auto _ : state) {
    for (const auto& q : queries) benchmark::DoNotOptimize(tree.nearest(q));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries.size()));
}
BENCHMARK(BM_KdTreeQuery)->RangeMultiplier(8)->Range(512, 32768);

void BM_TranslationChamfer(benchmark::State& state) {
  // Body sized like the human mesh, target like a keyframe human crop.
  const share::TranslationChamfer chamfer(cloud(6890, 4), cloud(static_cast<std::size_t>(state.range(0)), 5));
  const Vec3 t(0.01, -0.02, 0.03);
  for (auto _ : state) benchmark::DoNotOptimize(chamfer.evaluate(t));
}
BENCHMARK(BM_TranslationChamfer)->Arg(1000)->Arg(5000)->Arg(20000);

void BM_MergeScene(benchmark::State& state) {
  const share::SynthResult synth = share::generate(share::SynthSpec{});
  const auto& b = synth.bundle;
  const share::PointMap first = share::back_project(b.keyframe_depth[0]);
  const share::PointMap last = share::back_project(b.keyframe_depth[1]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(share::merge_scene(first, last, b.keyframe_mask(0), b.keyframe_mask(1)));
  }
}
BENCHMARK(BM_MergeScene);

void BM_Pipeline(benchmark::State& state) {
  const share::SynthResult synth = share::generate(share::SynthSpec{});
  share::OptimizeConfig config;
  config.iterations = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(share::run_pipeline(synth.bundle, config));
}
BENCHMARK(BM_Pipeline)->Arg(600)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
