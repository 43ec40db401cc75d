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

#ifndef PRAE_METRICS_H_
#define PRAE_METRICS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "prae/assignment.h"
#include "prae/geometry.h"
#include "prae/nearest.h"

namespace prae {

// Symmetric Chamfer distance: mean squared nearest-neighbor distance from
// P to Q plus the same from Q to P, each side normalized by its own size.
double chamfer(const PointCloud& p, const PointCloud& q,
               NNBackend backend = NNBackend::kSpatialIndex);

// Both directed Chamfer terms, in the accumulation order chamfer() uses.
struct ChamferTerms {
  double p_to_q = 0.0;  // mean over P of min_q |p-q|^2
  double q_to_p = 0.0;
  double total() const { return p_to_q + q_to_p; }
};
ChamferTerms chamfer_terms(const PointCloud& p, const PointCloud& q,
                           NNBackend backend = NNBackend::kSpatialIndex);

// Largest unsquared nearest-neighbor distance in either direction.
double hausdorff(const PointCloud& p, const PointCloud& q,
                 NNBackend backend = NNBackend::kSpatialIndex);

enum class EmdCost {
  kSquared,    // mean of |p - phi(p)|^2
  kEuclidean,  // mean of |p - phi(p)|, for comparison with other codebases
};

CostMatrix pairwise_costs(const PointCloud& p, const PointCloud& q,
                          EmdCost cost);

// Optimal bijection. total_cost is the mean pair cost (sum / n). Clouds
// must have equal size; resample otherwise.
Assignment emd_exact(const PointCloud& p, const PointCloud& q,
                     EmdCost cost = EmdCost::kSquared);

// Auction with epsilon scaling; `epsilon` is the final bid increment in
// quantized-cost units (<= 0 selects 1/(n+1)). total_cost is the mean
// pair cost of the assignment found.
Assignment emd_approx(const PointCloud& p, const PointCloud& q,
                      double epsilon = 0.0, EmdCost cost = EmdCost::kSquared,
                      AuctionStats* stats = nullptr);

enum class ThresholdSource { kGroundTruth, kPrediction, kUnion };

struct F1Options {
  double fraction = 0.01;  // of the bounding-box diagonal
  ThresholdSource source = ThresholdSource::kGroundTruth;
};

struct F1Result {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double threshold = 0.0;
  bool zero_threshold = false;  // degenerate box: exact-match semantics
};

F1Result f1_score(const PointCloud& pred, const PointCloud& gt,
                  NNBackend backend = NNBackend::kSpatialIndex,
                  const F1Options& options = {});

enum class EmdMode {
  kAuto,    // exact when n <= kExactEmdLimit, auction otherwise
  kExact,
  kApprox,
  kSkip,
};

inline constexpr std::size_t kExactEmdLimit = 512;

struct MetricsReport {
  double cd = 0.0;
  double emd = 0.0;
  double hd = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double threshold_used = 0.0;
  bool emd_evaluated = false;

  friend bool operator==(const MetricsReport&,
                         const MetricsReport&) = default;
};

struct MetricOptions {
  NNBackend backend = NNBackend::kSpatialIndex;
  EmdMode emd_mode = EmdMode::kAuto;
  EmdCost emd_cost = EmdCost::kSquared;
  F1Options f1;
};

MetricsReport evaluate_pair(const PointCloud& pred, const PointCloud& gt,
                            const MetricOptions& options = {});

// Mean of per-pair reports. Pairs are evaluated in parallel (see
// parallel.h); the reduction runs in index order, so the result does not
// depend on the thread count.
MetricsReport evaluate_pairs(std::span<const PointCloud> preds,
                             std::span<const PointCloud> gts,
                             const MetricOptions& options = {});

}  // namespace prae

#endif  // PRAE_METRICS_H_
