#include <random>

#include <benchmark/benchmark.h>

#include "decopt/harness.hpp"

namespace {

using namespace decopt;

Dataset synthetic(int rows, int dim) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> normal;
  Dataset d;
  d.features.resize(rows, dim);
  d.labels.resize(rows);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < dim; ++c) d.features(r, c) = normal(gen);
    d.labels[r] = d.features(r, 0) + 0.5 * normal(gen) > 0 ? 1.0 : -1.0;
  }
  return d;
}

const LogisticObjective& logistic() {
  static const LogisticObjective obj(partition_dataset(synthetic(2000, 32), 10, 10, 0), 0.1);
  return obj;
}

const GraphSequence& network() {
  static const GraphSequence seq = random_geometric_sequence(10, 0.5, 0, 50);
  return seq;
}

void BM_AdomVrStep(benchmark::State& state) {
  const auto& obj = logistic();
  const auto& info = obj.smoothness();
  const AdomVrParams p = adom_vr_params(info.mu, info.L, info.Lbar, 40.0, 10,
                                        adom_vr_batch_size(info.mu, info.L, info.Lbar, 10));
  AdomVrState s = adom_vr_init(obj, Vector::Zero(obj.dim()));
  for (auto _ : state) adom_vr_step(s, p, obj, network(), 1);
}
BENCHMARK(BM_AdomVrStep);

void BM_GtPageStep(benchmark::State& state) {
  const auto& obj = logistic();
  const auto& info = obj.smoothness();
  const GtPageParams p = with_step_size(gt_page_params(info.L, info.Lhat, 40.0, 10), 0.1);
  GtPageState s = gt_page_init(obj, Vector::Zero(obj.dim()));
  for (auto _ : state) gt_page_step(s, p, obj, network(), 1);
}
BENCHMARK(BM_GtPageStep);

void BM_GradientTrackingStep(benchmark::State& state) {
  const auto& obj = logistic();
  GradientTrackingState s = gradient_tracking_init(obj, Vector::Zero(obj.dim()));
  for (auto _ : state) gradient_tracking_step(s, 0.01, obj, network());
}
BENCHMARK(BM_GradientTrackingStep);

void BM_FullGradient(benchmark::State& state) {
  const auto& obj = logistic();
  const NodeVector x(obj.nodes(), obj.dim());
  for (auto _ : state) benchmark::DoNotOptimize(full_gradient(obj, x));
}
BENCHMARK(BM_FullGradient);

}  // namespace
