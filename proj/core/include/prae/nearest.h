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

#ifndef PRAE_NEAREST_H_
#define PRAE_NEAREST_H_

#include <cstddef>
#include <span>
#include <vector>

#include "prae/geometry.h"

namespace prae {

enum class NNBackend { kBruteForce, kSpatialIndex };

struct Neighbor {
  std::size_t index = 0;
  double sq_distance = 0.0;
};

// Exact 3-D kd-tree. Among equidistant candidates the lowest index wins, so
// results coincide with a first-index brute-force scan.
template <typename T>
class KdTree {
 public:
  explicit KdTree(std::span<const Point3<T>> points,
                  std::size_t leaf_size = 8);

  Neighbor nearest(const Point3<T>& query) const;
  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    std::size_t left = 0, right = 0;
    std::size_t begin = 0, end = 0;
  };

  std::size_t build(std::size_t begin, std::size_t end);
  void search(std::size_t node, const Point3<T>& q, Neighbor& best) const;

  std::vector<Point3<T>> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_;
};

// For every point of `from`, its nearest neighbor in `to`. Throws
// DimensionError if `to` is empty.
template <typename T>
std::vector<Neighbor> nearest_neighbors(std::span<const Point3<T>> from,
                                        std::span<const Point3<T>> to,
                                        NNBackend backend);

// Squared nearest-neighbor distances from each point of `from` into `to`.
std::vector<double> nn_distances(const PointCloud& from, const PointCloud& to,
                                 NNBackend backend);

// Picks the index for larger problems, brute force for tiny ones. Both are
// exact, so the choice never changes a result.
NNBackend default_backend(std::size_t from_size, std::size_t to_size);

extern template class KdTree<float>;
extern template class KdTree<double>;

}  // namespace prae

#endif  // PRAE_NEAREST_H_
