#include <benchmark/benchmark.h>

#include "pkd/pkd.hpp"

using namespace pkd;

namespace {

using Pt = Point<long long, 3>;

std::vector<Pt> points(std::size_t n, Distribution dist = Distribution::Uniform) {
  GenSpec<long long, 3> spec;
  spec.dist = dist;
  spec.n = n;
  spec.seed = 42;
  return generate(spec);
}

void BM_Build(benchmark::State& state) {
  auto pts = points(std::size_t(state.range(0)));
  for (auto _ : state) {
    auto copy = pts;
    auto* t = build(copy, Config{});
    benchmark::DoNotOptimize(t);
    destroy_tree(t);
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Build)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_Knn(benchmark::State& state) {
  auto pts = points(1'000'000);
  KdTree<long long, 3> tree;
  tree.build(pts);
  auto queries = points(1'024, Distribution::Varden);
  std::size_t i = 0;
  for (auto _ : state) {
    auto res = tree.knn(queries[i++ & 1023], std::size_t(state.range(0)));
    benchmark::DoNotOptimize(res);
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()));
}
BENCHMARK(BM_Knn)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_RangeCount(benchmark::State& state) {
  auto pts = points(1'000'000);
  KdTree<long long, 3> tree;
  tree.build(pts);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long long> coord(0, 1'000'000'000 - 10'000'000);
  const long long side = state.range(0);
  for (auto _ : state) {
    Pt lo{{coord(rng), coord(rng), coord(rng)}};
    Pt hi{{lo[0] + side, lo[1] + side, lo[2] + side}};
    benchmark::DoNotOptimize(tree.range_count({lo, hi}));
  }
}
BENCHMARK(BM_RangeCount)->Arg(1'000'000)->Arg(10'000'000)->Unit(benchmark::kMicrosecond);

void BM_BatchInsert(benchmark::State& state) {
  auto pts = points(1'000'000);
  KdTree<long long, 3> base;
  base.build(pts);
  auto batch = points(std::size_t(state.range(0)), Distribution::Varden);
  for (auto _ : state) {
    state.PauseTiming();
    auto tree = base.copy();
    auto b = batch;
    state.ResumeTiming();
    tree.insert(std::move(b));
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_BatchInsert)->Arg(100)->Arg(10'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
