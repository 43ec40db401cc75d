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

#ifndef PRAE_LOSS_H_
#define PRAE_LOSS_H_

#include <span>
#include <vector>

#include "prae/geometry.h"
#include "prae/nearest.h"
#include "prae/tensor.h"

namespace prae {

// Multi-head Chamfer loss against one ground-truth cloud P:
//
//   L = (1/M) sum_i [ (1/N_P) sum_p min_q |p-q|^2
//                   + (1/N_Qi) sum_{q in Qi} min_p |q-p|^2 ]
//
// Every head is compared with the whole of P. Gradients treat the
// nearest-neighbor correspondences as fixed; on ties the lowest index wins
// and receives the gradient. With M = 1 the value is bit-identical to
// chamfer(P, Q1).
struct MultiheadLoss {
  double loss = 0.0;
  // Per head, d(loss)/d(point), one 3-vector per predicted point.
  std::vector<std::vector<Point3<double>>> grads;
};

MultiheadLoss multihead_chamfer_loss(const PointCloud& gt,
                                     std::span<const PointCloud> heads,
                                     NNBackend backend = NNBackend::kSpatialIndex);

// Scalar-generic kernel for one sample. Adds grad_scale * d(loss)/d(q)
// into head_grads[i] (same length as heads[i]) when head_grads is non-null.
template <typename T>
double multihead_chamfer_sample(std::span<const Point3<T>> gt,
                                const std::vector<std::span<const Point3<T>>>& heads,
                                const std::vector<std::span<Point3<T>>>* head_grads,
                                double grad_scale, NNBackend backend);

template <typename T>
struct BatchLoss {
  double loss = 0.0;                       // mean over the batch
  std::vector<BasicTensor<T>> head_grads;  // [B,K/M,3] per head
};

// Batched loss for training: ground truth in encoder layout [B,3,N], heads
// in decoder layout [B,K/M,3]. The loss is averaged over batch elements.
template <typename T>
BatchLoss<T> batch_multihead_chamfer_loss(
    const BasicTensor<T>& gt_batch, const std::vector<BasicTensor<T>>& heads,
    bool with_grads = true);

}  // namespace prae

#endif  // PRAE_LOSS_H_
