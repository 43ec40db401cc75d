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

#include "prae/metrics.h"

#include <algorithm>
#include <cmath>

#include "prae/error.h"
#include "prae/log.h"
#include "prae/parallel.h"

namespace prae {
namespace {

void require_nonempty(const PointCloud& c, const char* where) {
  if (c.empty()) throw DimensionError(std::string(where) + ": empty cloud");
}

void require_equal_sizes(const PointCloud& p, const PointCloud& q,
                         const char* where) {
  require_nonempty(p, where);
  if (p.size() != q.size()) {
    throw DimensionError(std::string(where) +
                         ": EMD needs a bijection; resample both clouds to "
                         "the same size (got " +
                         std::to_string(p.size()) + " and " +
                         std::to_string(q.size()) + ")");
  }
}

double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

ChamferTerms chamfer_terms(const PointCloud& p, const PointCloud& q,
                           NNBackend backend) {
  require_nonempty(p, "chamfer");
  require_nonempty(q, "chamfer");
  return {mean(nn_distances(p, q, backend)), mean(nn_distances(q, p, backend))};
}

double chamfer(const PointCloud& p, const PointCloud& q, NNBackend backend) {
  return chamfer_terms(p, q, backend).total();
}

double hausdorff(const PointCloud& p, const PointCloud& q, NNBackend backend) {
  require_nonempty(p, "hausdorff");
  require_nonempty(q, "hausdorff");
  const std::vector<double> pq = nn_distances(p, q, backend);
  const std::vector<double> qp = nn_distances(q, p, backend);
  const double worst = std::max(*std::max_element(pq.begin(), pq.end()),
                                *std::max_element(qp.begin(), qp.end()));
  return std::sqrt(worst);
}

CostMatrix pairwise_costs(const PointCloud& p, const PointCloud& q,
                          EmdCost cost) {
  require_equal_sizes(p, q, "pairwise_costs");
  const std::size_t n = p.size();
  CostMatrix m{n, std::vector<double>(n * n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = squared_distance(p[i], q[j]);
      m.cost[i * n + j] = cost == EmdCost::kSquared ? d : std::sqrt(d);
    }
  }
  return m;
}

Assignment emd_exact(const PointCloud& p, const PointCloud& q, EmdCost cost) {
  require_equal_sizes(p, q, "emd_exact");
  Assignment a = solve_assignment_exact(pairwise_costs(p, q, cost));
  a.total_cost /= static_cast<double>(p.size());
  return a;
}

Assignment emd_approx(const PointCloud& p, const PointCloud& q,
                      double epsilon, EmdCost cost, AuctionStats* stats) {
  require_equal_sizes(p, q, "emd_approx");
  AuctionOptions options;
  options.final_epsilon = epsilon;
  Assignment a =
      solve_assignment_auction(pairwise_costs(p, q, cost), options, stats);
  a.total_cost /= static_cast<double>(p.size());
  return a;
}

F1Result f1_score(const PointCloud& pred, const PointCloud& gt,
                  NNBackend backend, const F1Options& options) {
  require_nonempty(pred, "f1_score");
  require_nonempty(gt, "f1_score");
  Bounds box;
  switch (options.source) {
    case ThresholdSource::kGroundTruth:
      box = bounding_box(gt.points());
      break;
    case ThresholdSource::kPrediction:
      box = bounding_box(pred.points());
      break;
    case ThresholdSource::kUnion: {
      const Bounds a = bounding_box(gt.points());
      const Bounds b = bounding_box(pred.points());
      for (int k = 0; k < 3; ++k) {
        box.min[k] = std::min(a.min[k], b.min[k]);
        box.max[k] = std::max(a.max[k], b.max[k]);
      }
      break;
    }
  }
  F1Result r;
  r.threshold = options.fraction * box.diagonal();
  if (r.threshold == 0.0) {
    r.zero_threshold = true;
    log_warning("f1_score: degenerate bounding box, threshold is zero "
                "(exact-match semantics)");
  }
  const double tau_sq = r.threshold * r.threshold;
  auto fraction_within = [&](const std::vector<double>& d) {
    std::size_t hits = 0;
    for (double x : d) hits += x <= tau_sq ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(d.size());
  };
  r.precision = fraction_within(nn_distances(pred, gt, backend));
  r.recall = fraction_within(nn_distances(gt, pred, backend));
  const double denom = r.precision + r.recall;
  r.f1 = denom > 0.0 ? 2.0 * r.precision * r.recall / denom : 0.0;
  return r;
}

MetricsReport evaluate_pair(const PointCloud& pred, const PointCloud& gt,
                            const MetricOptions& options) {
  MetricsReport r;
  r.cd = chamfer(pred, gt, options.backend);
  r.hd = hausdorff(pred, gt, options.backend);
  const F1Result f1 = f1_score(pred, gt, options.backend, options.f1);
  r.f1 = f1.f1;
  r.precision = f1.precision;
  r.recall = f1.recall;
  r.threshold_used = f1.threshold;

  EmdMode mode = options.emd_mode;
  if (mode == EmdMode::kAuto) {
    mode = pred.size() <= kExactEmdLimit ? EmdMode::kExact : EmdMode::kApprox;
  }
  if (mode == EmdMode::kExact) {
    r.emd = emd_exact(pred, gt, options.emd_cost).total_cost;
    r.emd_evaluated = true;
  } else if (mode == EmdMode::kApprox) {
    r.emd = emd_approx(pred, gt, 0.0, options.emd_cost).total_cost;
    r.emd_evaluated = true;
  }
  return r;
}

MetricsReport evaluate_pairs(std::span<const PointCloud> preds,
                             std::span<const PointCloud> gts,
                             const MetricOptions& options) {
  if (preds.size() != gts.size() || preds.empty()) {
    throw DimensionError("evaluate_pairs: need equally many, non-zero pairs");
  }
  std::vector<MetricsReport> reports(preds.size());
  parallel_for(preds.size(), [&](std::size_t i) {
    reports[i] = evaluate_pair(preds[i], gts[i], options);
  });
  MetricsReport avg;
  for (const MetricsReport& r : reports) {
    avg.cd += r.cd;
    avg.emd += r.emd;
    avg.hd += r.hd;
    avg.f1 += r.f1;
    avg.precision += r.precision;
    avg.recall += r.recall;
    avg.threshold_used += r.threshold_used;
  }
  const double n = static_cast<double>(reports.size());
  avg.cd /= n;
  avg.emd /= n;
  avg.hd /= n;
  avg.f1 /= n;
  avg.precision /= n;
  avg.recall /= n;
  avg.threshold_used /= n;
  avg.emd_evaluated = reports.front().emd_evaluated;
  return avg;
}

}  // namespace prae
