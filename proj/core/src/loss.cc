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

#include "prae/loss.h"

#include "prae/error.h"
#include "prae/parallel.h"

namespace prae {

template <typename T>
double multihead_chamfer_sample(
    std::span<const Point3<T>> gt,
    const std::vector<std::span<const Point3<T>>>& heads,
    const std::vector<std::span<Point3<T>>>* head_grads, double grad_scale,
    NNBackend backend) {
  if (gt.empty()) throw DimensionError("multihead loss: empty ground truth");
  if (heads.empty()) throw DimensionError("multihead loss: no heads");
  const double m = static_cast<double>(heads.size());
  const double n_p = static_cast<double>(gt.size());

  double total = 0.0;
  for (std::size_t h = 0; h < heads.size(); ++h) {
    const std::span<const Point3<T>> q = heads[h];
    if (q.empty()) throw DimensionError("multihead loss: empty head output");
    const double n_q = static_cast<double>(q.size());
    const std::vector<Neighbor> gt_to_head = nearest_neighbors(gt, q, backend);
    const std::vector<Neighbor> head_to_gt = nearest_neighbors(q, gt, backend);

    double sum_p = 0.0;
    for (const Neighbor& nb : gt_to_head) sum_p += nb.sq_distance;
    double sum_q = 0.0;
    for (const Neighbor& nb : head_to_gt) sum_q += nb.sq_distance;
    total += sum_p / n_p + sum_q / n_q;

    if (head_grads) {
      std::span<Point3<T>> g = (*head_grads)[h];
      const double c1 = grad_scale * 2.0 / (m * n_p);
      for (std::size_t i = 0; i < gt.size(); ++i) {
        const std::size_t k = gt_to_head[i].index;
        for (int a = 0; a < 3; ++a) {
          g[k][a] += static_cast<T>(
              c1 * (static_cast<double>(q[k][a]) - static_cast<double>(gt[i][a])));
        }
      }
      const double c2 = grad_scale * 2.0 / (m * n_q);
      for (std::size_t k = 0; k < q.size(); ++k) {
        const std::size_t i = head_to_gt[k].index;
        for (int a = 0; a < 3; ++a) {
          g[k][a] += static_cast<T>(
              c2 * (static_cast<double>(q[k][a]) - static_cast<double>(gt[i][a])));
        }
      }
    }
  }
  return total / m;
}

MultiheadLoss multihead_chamfer_loss(const PointCloud& gt,
                                     std::span<const PointCloud> heads,
                                     NNBackend backend) {
  std::vector<std::span<const Point3f>> views;
  for (const PointCloud& h : heads) views.push_back(h.points());
  std::vector<std::vector<Point3<double>>> grads_d(heads.size());
  std::vector<std::vector<Point3f>> grads_f(heads.size());
  for (std::size_t h = 0; h < heads.size(); ++h) {
    grads_f[h].assign(heads[h].size(), Point3f{0, 0, 0});
  }
  // Gradients are accumulated in double through a double copy of the
  // points; the loss value itself comes from the float path.
  std::vector<std::vector<Point3<double>>> pts_d(heads.size());
  std::vector<std::span<const Point3<double>>> views_d;
  std::vector<std::span<Point3<double>>> grad_views;
  for (std::size_t h = 0; h < heads.size(); ++h) {
    for (const Point3f& p : heads[h].points()) {
      pts_d[h].push_back({p[0], p[1], p[2]});
    }
    grads_d[h].assign(heads[h].size(), Point3<double>{0, 0, 0});
    views_d.push_back(pts_d[h]);
    grad_views.push_back(grads_d[h]);
  }
  std::vector<Point3<double>> gt_d;
  for (const Point3f& p : gt.points()) gt_d.push_back({p[0], p[1], p[2]});

  MultiheadLoss out;
  out.loss = multihead_chamfer_sample<float>(gt.points(), views, nullptr, 1.0,
                                             backend);
  multihead_chamfer_sample<double>(gt_d, views_d, &grad_views, 1.0, backend);
  out.grads = std::move(grads_d);
  return out;
}

template <typename T>
BatchLoss<T> batch_multihead_chamfer_loss(
    const BasicTensor<T>& gt_batch, const std::vector<BasicTensor<T>>& heads,
    bool with_grads) {
  if (gt_batch.rank() != 3 || gt_batch.dim(1) != 3) {
    throw DimensionError("ground truth must be [B,3,N], got " +
                         shape_string(gt_batch.shape()));
  }
  if (heads.empty()) throw DimensionError("multihead loss: no heads");
  const std::size_t batch = gt_batch.dim(0), n = gt_batch.dim(2);
  for (const auto& h : heads) {
    if (h.rank() != 3 || h.dim(0) != batch || h.dim(2) != 3 ||
        h.dim(1) != heads.front().dim(1)) {
      throw DimensionError("head outputs must all be [B,K/M,3]");
    }
  }
  const std::size_t k = heads.front().dim(1);

  BatchLoss<T> out;
  if (with_grads) {
    for (std::size_t h = 0; h < heads.size(); ++h) {
      out.head_grads.emplace_back(heads[h].shape());
    }
  }
  std::vector<double> losses(batch);
  const double scale = 1.0 / static_cast<double>(batch);
  const NNBackend backend = default_backend(n, k);
  parallel_for(batch, [&](std::size_t b) {
    std::vector<Point3<T>> gt(n);
    for (std::size_t i = 0; i < n; ++i) {
      gt[i] = {gt_batch.at(b, 0, i), gt_batch.at(b, 1, i), gt_batch.at(b, 2, i)};
    }
    std::vector<std::span<const Point3<T>>> views;
    std::vector<std::span<Point3<T>>> grads;
    for (std::size_t h = 0; h < heads.size(); ++h) {
      // [B,K,3] rows are contiguous xyz triples.
      const auto* base = reinterpret_cast<const Point3<T>*>(
          heads[h].data() + b * k * 3);
      views.emplace_back(base, k);
      if (with_grads) {
        auto* gbase = reinterpret_cast<Point3<T>*>(
            out.head_grads[h].data() + b * k * 3);
        grads.emplace_back(gbase, k);
      }
    }
    losses[b] = multihead_chamfer_sample<T>(
        gt, views, with_grads ? &grads : nullptr, scale, backend);
  });
  double sum = 0.0;
  for (double l : losses) sum += l;
  out.loss = sum / static_cast<double>(batch);
  return out;
}

template double multihead_chamfer_sample(
    std::span<const Point3f>, const std::vector<std::span<const Point3f>>&,
    const std::vector<std::span<Point3f>>*, double, NNBackend);
template double multihead_chamfer_sample(
    std::span<const Point3<double>>,
    const std::vector<std::span<const Point3<double>>>&,
    const std::vector<std::span<Point3<double>>>*, double, NNBackend);
template BatchLoss<float> batch_multihead_chamfer_loss(
    const BasicTensor<float>&, const std::vector<BasicTensor<float>>&, bool);
template BatchLoss<double> batch_multihead_chamfer_loss(
    const BasicTensor<double>&, const std::vector<BasicTensor<double>>&, bool);

}  // namespace prae
