// Serial reference kernels against their OpenMP versions.
// Argument is the image side n (n^2 patches).

#include <benchmark/benchmark.h>

#include <vector>

#include "ggd/pipeline.hpp"

using namespace ggd;

namespace {

Image noisy(std::size_t n) { return add_uniform_noise(synthetic::scene(n), {60.0, 1}); }

template <bool Parallel>
void knn(benchmark::State& state) {
  const PatchSet p = extract_patches(noisy(std::size_t(state.range(0))), 5);
  for (auto _ : state) {
    auto t = Parallel ? knn_table(p, 10, Metric::euclidean()) : serial::knn_table(p, 10, Metric::euclidean());
    benchmark::DoNotOptimize(t);
  }
}

template <bool Parallel>
void apsp(benchmark::State& state) {
  const PatchGraph g = build_knn_graph(extract_patches(noisy(std::size_t(state.range(0))), 5), 10,
                                       Metric::euclidean());
  for (auto _ : state) {
    auto d = Parallel ? all_pairs_shortest_paths(g, ApspBackend::dijkstra)
                      : serial::all_pairs_shortest_paths(g, ApspBackend::dijkstra);
    benchmark::DoNotOptimize(d);
  }
}

template <bool Parallel>
void packed_multiply(benchmark::State& state) {
  const std::size_t n = std::size_t(state.range(0));
  const std::size_t m = n * n;
  std::vector<double> v(PackedSymmetric::packed_length(m));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = double(i % 97) * 0.01;
  const PackedSymmetric a(m, std::move(v));
  std::vector<double> x(m, 1.0), y(m);
  for (auto _ : state) {
    if (Parallel)
      a.multiply(x, y);
    else
      serial::multiply(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Parallel>
void merge(benchmark::State& state) {
  const PatchSet p = extract_patches(noisy(std::size_t(state.range(0))), 7);
  for (auto _ : state) {
    Image out = Parallel ? merge_patches(p) : serial::merge_patches(p);
    benchmark::DoNotOptimize(out);
  }
}

}  // namespace

BENCHMARK(knn<false>)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(knn<true>)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(apsp<false>)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(apsp<true>)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(packed_multiply<false>)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(packed_multiply<true>)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(merge<false>)->Arg(64)->Arg(100)->Unit(benchmark::kMicrosecond);
BENCHMARK(merge<true>)->Arg(64)->Arg(100)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
