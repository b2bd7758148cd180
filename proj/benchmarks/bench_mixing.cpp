#include <random>

#include <benchmark/benchmark.h>

#include "decopt/network.hpp"

namespace {

using namespace decopt;

NodeVector random_iterate(int nodes, int dim) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal;
  NodeVector x(nodes, dim);
  for (auto& e : x.mat().reshaped()) e = normal(gen);
  return x;
}

void BM_ApplyMixing(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const GossipMatrix w = gossip_from_laplacian(ring_graph(m));
  const NodeVector x = random_iterate(m, 64);
  for (auto _ : state) benchmark::DoNotOptimize(apply_mixing(w, x));
}
BENCHMARK(BM_ApplyMixing)->Arg(10)->Arg(100)->Arg(400);

void BM_MultiStageRotatingStar(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const GraphSequence seq = rotating_star_sequence(m);
  const NodeVector x = random_iterate(m, 64);
  for (auto _ : state) benchmark::DoNotOptimize(multi_stage_mix(seq, 0, m, x));
}
BENCHMARK(BM_MultiStageRotatingStar)->Arg(9)->Arg(30);

void BM_Chebyshev(benchmark::State& state) {
  const GossipMatrix w = gossip_from_laplacian(star_graph(50));
  const NodeVector x = random_iterate(50, 64);
  const int degree = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(chebyshev_mix(w, degree, x));
}
BENCHMARK(BM_Chebyshev)->Arg(2)->Arg(8)->Arg(16);

void BM_RandomGeometricSequence(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(random_geometric_sequence(20, 0.5, 3, state.range(0)));
  }
}
BENCHMARK(BM_RandomGeometricSequence)->Arg(10)->Arg(100);

}  // namespace
