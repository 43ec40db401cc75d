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

#include "prae/nearest.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "prae/error.h"

namespace prae {
namespace {

inline bool better(double d, std::size_t idx, const Neighbor& best) {
  return d < best.sq_distance || (d == best.sq_distance && idx < best.index);
}

template <typename T>
Neighbor brute_force_nearest(const Point3<T>& q,
                             std::span<const Point3<T>> to) {
  Neighbor best{0, squared_distance(q, to[0])};
  for (std::size_t j = 1; j < to.size(); ++j) {
    const double d = squared_distance(q, to[j]);
    if (d < best.sq_distance) best = {j, d};
  }
  return best;
}

}  // namespace

template <typename T>
KdTree<T>::KdTree(std::span<const Point3<T>> points, std::size_t leaf_size)
    : points_(points.begin(), points.end()),
      order_(points.size()),
      leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  if (points_.empty()) throw DimensionError("KdTree: empty point set");
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * points_.size() / leaf_size_ + 1);
  build(0, points_.size());
}

template <typename T>
std::size_t KdTree<T>::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back(Node{});
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= leaf_size_) return id;

  // Split the widest axis at the median point.
  double lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::numeric_limits<double>::infinity();
    hi[a] = -lo[a];
  }
  for (std::size_t i = begin; i < end; ++i) {
    const Point3<T>& p = points_[order_[i]];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], static_cast<double>(p[a]));
      hi[a] = std::max(hi[a], static_cast<double>(p[a]));
    }
  }
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](std::size_t a, std::size_t b) {
                     const T ca = points_[a][axis], cb = points_[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const double split = points_[order_[mid]][axis];
  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

template <typename T>
void KdTree<T>::search(std::size_t node_id, const Point3<T>& q,
                       Neighbor& best) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t idx = order_[i];
      const double d = squared_distance(q, points_[idx]);
      if (better(d, idx, best)) best = {idx, d};
    }
    return;
  }
  const double diff = static_cast<double>(q[node.axis]) - node.split;
  const std::size_t near = diff < 0.0 ? node.left : node.right;
  const std::size_t far = diff < 0.0 ? node.right : node.left;
  search(near, q, best);
  // Equality still descends: an equidistant point with a lower index may
  // live on the far side.
  if (diff * diff <= best.sq_distance) search(far, q, best);
}

template <typename T>
Neighbor KdTree<T>::nearest(const Point3<T>& query) const {
  Neighbor best{std::numeric_limits<std::size_t>::max(),
                std::numeric_limits<double>::infinity()};
  search(0, query, best);
  return best;
}

template <typename T>
std::vector<Neighbor> nearest_neighbors(std::span<const Point3<T>> from,
                                        std::span<const Point3<T>> to,
                                        NNBackend backend) {
  if (to.empty()) throw DimensionError("nearest neighbor target is empty");
  std::vector<Neighbor> out(from.size());
  if (backend == NNBackend::kBruteForce) {
    for (std::size_t i = 0; i < from.size(); ++i) {
      out[i] = brute_force_nearest(from[i], to);
    }
  } else {
    const KdTree<T> tree(to);
    for (std::size_t i = 0; i < from.size(); ++i) {
      out[i] = tree.nearest(from[i]);
    }
  }
  return out;
}

std::vector<double> nn_distances(const PointCloud& from, const PointCloud& to,
                                 NNBackend backend) {
  const std::vector<Neighbor> nn =
      nearest_neighbors<float>(from.points(), to.points(), backend);
  std::vector<double> d(nn.size());
  for (std::size_t i = 0; i < nn.size(); ++i) d[i] = nn[i].sq_distance;
  return d;
}

NNBackend default_backend(std::size_t from_size, std::size_t to_size) {
  return from_size * to_size > 64 * 64 ? NNBackend::kSpatialIndex
                                       : NNBackend::kBruteForce;
}

template class KdTree<float>;
template class KdTree<double>;
template std::vector<Neighbor> nearest_neighbors(std::span<const Point3f>,
                                                 std::span<const Point3f>,
                                                 NNBackend);
template std::vector<Neighbor> nearest_neighbors(
    std::span<const Point3<double>>, std::span<const Point3<double>>,
    NNBackend);

}  // namespace prae
