// Copyright 2026 The prae Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "prae/loss.h"
#include "prae/metrics.h"
#include "prae/model.h"
#include "prae/nearest.h"

namespace prae {
namespace {

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<Point3f> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  return PointCloud(std::move(pts));
}

Tensor random_batch(std::size_t batch, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  Tensor t({batch, 3, n});
  for (float& v : t.values()) v = u(rng);
  return t;
}

void BM_NearestNeighbors(benchmark::State& state, NNBackend backend) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PointCloud p = random_cloud(n, 1);
  const PointCloud q = random_cloud(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn_distances(p, q, backend));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_NearestNeighbors, kd_tree, NNBackend::kSpatialIndex)
    ->RangeMultiplier(4)->Range(256, 4096)->Complexity();
BENCHMARK_CAPTURE(BM_NearestNeighbors, brute_force, NNBackend::kBruteForce)
    ->RangeMultiplier(4)->Range(256, 4096)->Complexity();

void BM_Chamfer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PointCloud p = random_cloud(n, 3);
  const PointCloud q = random_cloud(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(chamfer(p, q));
}
BENCHMARK(BM_Chamfer)->Arg(256)->Arg(2048);

void BM_EmdExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PointCloud p = random_cloud(n, 5);
  const PointCloud q = random_cloud(n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(emd_exact(p, q));
}
BENCHMARK(BM_EmdExact)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_EmdApprox(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PointCloud p = random_cloud(n, 7);
  const PointCloud q = random_cloud(n, 8);
  for (auto _ : state) benchmark::DoNotOptimize(emd_approx(p, q));
}
BENCHMARK(BM_EmdApprox)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_MultiheadLoss(benchmark::State& state) {
  const auto heads = static_cast<std::size_t>(state.range(0));
  const std::size_t n = 1024;
  const PointCloud gt = random_cloud(n, 9);
  std::vector<PointCloud> preds;
  for (std::size_t h = 0; h < heads; ++h) preds.push_back(random_cloud(n / heads, 10 + h));
  for (auto _ : state) benchmark::DoNotOptimize(multihead_chamfer_loss(gt, preds));
}
BENCHMARK(BM_MultiheadLoss)->Arg(1)->Arg(2)->Arg(4);

void BM_Reconstruct(benchmark::State& state, Backbone backbone) {
  const int depth = static_cast<int>(state.range(0));
  const auto heads = static_cast<std::size_t>(state.range(1));
  Model model = build_model(standard_spec(backbone, depth, heads), 1);
  const Tensor x = random_batch(8, 2048, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.reconstruct(x, Mode::kEval));
  }
  state.SetItemsProcessed(state.iterations() * 8);
}
BENCHMARK_CAPTURE(BM_Reconstruct, light_ae, Backbone::kLightAE)
    ->Args({1, 1})->Args({3, 2})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Reconstruct, deep_ae, Backbone::kDeepAE)
    ->Args({1, 1})->Args({3, 2})->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  const auto heads = static_cast<std::size_t>(state.range(0));
  Model model = build_model(standard_spec(Backbone::kLightAE, 2, heads, 512), 1);
  const Tensor x = random_batch(8, 512, 12);
  for (auto _ : state) {
    model.zero_grad();
    const auto out = model.forward_heads(x, Mode::kTrain, true);
    const auto loss = batch_multihead_chamfer_loss(x, out);
    model.backward(loss.head_grads);
    benchmark::DoNotOptimize(loss.loss);
  }
}
BENCHMARK(BM_TrainStep)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace prae

BENCHMARK_MAIN();
