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

#ifndef PRAE_GEOMETRY_H_
#define PRAE_GEOMETRY_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "prae/tensor.h"

namespace prae {

template <typename T>
using Point3 = std::array<T, 3>;
using Point3f = Point3<float>;

// Squared Euclidean distance accumulated in double. Every distance in the
// library goes through this so that backends agree bit for bit.
template <typename T>
inline double squared_distance(const Point3<T>& a, const Point3<T>& b) {
  const double dx = static_cast<double>(a[0]) - static_cast<double>(b[0]);
  const double dy = static_cast<double>(a[1]) - static_cast<double>(b[1]);
  const double dz = static_cast<double>(a[2]) - static_cast<double>(b[2]);
  return dx * dx + dy * dy + dz * dz;
}

// Ordered storage for an unordered point set.
class PointCloud {
 public:
  PointCloud() = default;
  // Throws NumericError if any coordinate is non-finite.
  explicit PointCloud(std::vector<Point3f> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::span<const Point3f> points() const { return points_; }
  const Point3f& operator[](std::size_t i) const { return points_[i]; }
  std::vector<Point3f>& mutable_points() { return points_; }

  // Sample `b` of an encoder-layout batch [B,3,N].
  static PointCloud from_channels(const Tensor& batch, std::size_t b);
  // Sample `b` of a decoder-layout batch [B,N,3].
  static PointCloud from_rows(const Tensor& batch, std::size_t b);

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::vector<Point3f> points_;
};

struct Bounds {
  Point3<double> min;
  Point3<double> max;
  double diagonal() const;
};

Bounds bounding_box(std::span<const Point3f> points);

// Packs clouds of equal size into an encoder-layout batch [B,3,N].
Tensor to_channels(std::span<const PointCloud> clouds);

}  // namespace prae

#endif  // PRAE_GEOMETRY_H_
