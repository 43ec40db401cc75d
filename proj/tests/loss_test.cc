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

#include <algorithm>
#include <random>
#include <span>
#include <vector>

#include "gtest/gtest.h"
#include "prae/error.h"
#include "prae/loss.h"
#include "prae/metrics.h"
#include "test_util.h"

namespace prae {
namespace {

using testing::finite_difference_error;
using testing::random_cloud;
using DPoints = std::vector<Point3<double>>;

DPoints random_dpoints(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DPoints pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  return pts;
}

double sample_loss(const DPoints& gt, const std::vector<DPoints>& heads,
                   std::vector<DPoints>* grads) {
  std::vector<std::span<const Point3<double>>> views;
  for (const auto& h : heads) views.emplace_back(h);
  std::vector<std::span<Point3<double>>> grad_views;
  if (grads) {
    grads->clear();
    for (const auto& h : heads) grads->emplace_back(h.size(), Point3<double>{});
    for (auto& g : *grads) grad_views.emplace_back(g);
  }
  return multihead_chamfer_sample<double>(gt, views, grads ? &grad_views : nullptr,
                                          1.0, NNBackend::kSpatialIndex);
}

TEST(MultiheadLossTest, SingleHeadIsChamferBitForBit) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const PointCloud p = random_cloud(1 + rng() % 60, rng);
    const PointCloud q = random_cloud(1 + rng() % 60, rng);
    const std::vector<PointCloud> heads{q};
    EXPECT_EQ(multihead_chamfer_loss(p, heads).loss, chamfer(p, q));
    EXPECT_EQ(multihead_chamfer_loss(p, heads, NNBackend::kBruteForce).loss,
              chamfer(p, q, NNBackend::kBruteForce));
  }
}

TEST(MultiheadLossTest, IdenticalHeadsEqualSingleChamfer) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud p = random_cloud(16, rng);
    const PointCloud q = random_cloud(8, rng);
    const std::vector<PointCloud> heads{q, q};
    EXPECT_NEAR(multihead_chamfer_loss(p, heads).loss, chamfer(p, q), 1e-12);
  }
}

TEST(MultiheadLossTest, ZeroWhenEveryHeadEqualsGroundTruth) {
  std::mt19937_64 rng(3);
  const PointCloud p = random_cloud(12, rng);
  const std::vector<PointCloud> heads{p, p, p};
  const MultiheadLoss r = multihead_chamfer_loss(p, heads);
  EXPECT_EQ(r.loss, 0.0);
  for (const auto& g : r.grads) {
    for (const auto& v : g) EXPECT_EQ(v, (Point3<double>{0, 0, 0}));
  }
}

TEST(MultiheadLossTest, NonNegativeAndPermutationInvariant) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const PointCloud p = random_cloud(16, rng);
    std::vector<PointCloud> heads{random_cloud(8, rng), random_cloud(8, rng)};
    const double base = multihead_chamfer_loss(p, heads).loss;
    EXPECT_GE(base, 0.0);
    std::vector<Point3f> gp(p.points().begin(), p.points().end());
    std::shuffle(gp.begin(), gp.end(), rng);
    std::vector<PointCloud> shuffled_heads;
    for (const auto& h : heads) {
      std::vector<Point3f> hp(h.points().begin(), h.points().end());
      std::shuffle(hp.begin(), hp.end(), rng);
      shuffled_heads.emplace_back(std::move(hp));
    }
    EXPECT_NEAR(multihead_chamfer_loss(PointCloud(gp), shuffled_heads).loss,
                base, 1e-9);
  }
}

TEST(MultiheadLossTest, EmptyInputsThrow) {
  std::mt19937_64 rng(5);
  const PointCloud p = random_cloud(4, rng);
  EXPECT_THROW(multihead_chamfer_loss(p, std::vector<PointCloud>{}),
               DimensionError);
  EXPECT_THROW(multihead_chamfer_loss(p, std::vector<PointCloud>{PointCloud()}),
               DimensionError);
  EXPECT_THROW(
      multihead_chamfer_loss(PointCloud(), std::vector<PointCloud>{p}),
      DimensionError);
}

TEST(MultiheadLossTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  for (std::size_t m : {1u, 2u, 4u}) {
    for (int instance = 0; instance < 20; ++instance) {
      const DPoints gt = random_dpoints(16, rng);
      std::vector<DPoints> heads;
      for (std::size_t h = 0; h < m; ++h) heads.push_back(random_dpoints(16 / m, rng));
      std::vector<DPoints> grads;
      sample_loss(gt, heads, &grads);
      auto loss = [&]() { return sample_loss(gt, heads, nullptr); };
      double worst = 0.0;
      for (std::size_t h = 0; h < m; ++h) {
        std::span<double> values(heads[h].front().data(), heads[h].size() * 3);
        std::span<const double> analytic(grads[h].front().data(),
                                         grads[h].size() * 3);
        worst = std::max(worst,
                         finite_difference_error(loss, values, analytic, 1e-6));
      }
      EXPECT_LT(worst, 1e-3) << "M=" << m << " instance " << instance;
    }
  }
}

TEST(MultiheadLossTest, FloatGradientsMatchDoubleKernel) {
  std::mt19937_64 rng(7);
  const PointCloud p = random_cloud(16, rng);
  const std::vector<PointCloud> heads{random_cloud(8, rng), random_cloud(8, rng)};
  const MultiheadLoss r = multihead_chamfer_loss(p, heads);
  DPoints gt;
  for (const auto& x : p.points()) gt.push_back({x[0], x[1], x[2]});
  std::vector<DPoints> dh;
  for (const auto& h : heads) {
    DPoints d;
    for (const auto& x : h.points()) d.push_back({x[0], x[1], x[2]});
    dh.push_back(d);
  }
  std::vector<DPoints> grads;
  EXPECT_NEAR(sample_loss(gt, dh, &grads), r.loss, 1e-12);
  for (std::size_t h = 0; h < 2; ++h) {
    for (std::size_t i = 0; i < 8; ++i) {
      for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(grads[h][i][k], r.grads[h][i][k], 1e-12);
      }
    }
  }
}

TEST(MultiheadLossTest, GradientStepDecreasesLoss) {
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const DPoints gt = random_dpoints(16, rng);
    std::vector<DPoints> heads{random_dpoints(8, rng), random_dpoints(8, rng)};
    std::vector<DPoints> grads;
    const double before = sample_loss(gt, heads, &grads);
    for (std::size_t h = 0; h < heads.size(); ++h) {
      for (std::size_t i = 0; i < heads[h].size(); ++i) {
        for (int k = 0; k < 3; ++k) heads[h][i][k] -= 1e-3 * grads[h][i][k];
      }
    }
    if (!(sample_loss(gt, heads, nullptr) < before)) ++failures;
  }
  EXPECT_LE(failures, 2);
}

TEST(BatchLossTest, AveragesSamples) {
  std::mt19937_64 rng(8);
  const std::size_t batch = 3, n = 12, per_head = 6;
  Tensor gt = testing::random_tensor<float>({batch, 3, n}, rng);
  std::vector<Tensor> heads{testing::random_tensor<float>({batch, per_head, 3}, rng),
                            testing::random_tensor<float>({batch, per_head, 3}, rng)};
  const BatchLoss<float> r = batch_multihead_chamfer_loss(gt, heads);
  double sum = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const std::vector<PointCloud> hc{PointCloud::from_rows(heads[0], b),
                                     PointCloud::from_rows(heads[1], b)};
    const MultiheadLoss one =
        multihead_chamfer_loss(PointCloud::from_channels(gt, b), hc);
    sum += one.loss;
    for (std::size_t h = 0; h < 2; ++h) {
      for (std::size_t i = 0; i < per_head; ++i) {
        for (std::size_t k = 0; k < 3; ++k) {
          EXPECT_NEAR(r.head_grads[h][(b * per_head + i) * 3 + k],
                      one.grads[h][i][k] / batch, 1e-6);
        }
      }
    }
  }
  EXPECT_NEAR(r.loss, sum / batch, 1e-12);
  EXPECT_THROW(batch_multihead_chamfer_loss(gt, std::vector<Tensor>{}),
               DimensionError);
}

}  // namespace
}  // namespace prae
