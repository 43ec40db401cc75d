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

#include "prae/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prae/error.h"

namespace prae {

PointCloud::PointCloud(std::vector<Point3f> points)
    : points_(std::move(points)) {
  for (const Point3f& p : points_) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2])) {
      throw NumericError("point cloud contains a non-finite coordinate");
    }
  }
}

PointCloud PointCloud::from_channels(const Tensor& batch, std::size_t b) {
  if (batch.rank() != 3 || batch.dim(1) != 3) {
    throw DimensionError("expected [B,3,N] batch, got " +
                         shape_string(batch.shape()));
  }
  const std::size_t n = batch.dim(2);
  std::vector<Point3f> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = {batch.at(b, 0, i), batch.at(b, 1, i), batch.at(b, 2, i)};
  }
  return PointCloud(std::move(pts));
}

PointCloud PointCloud::from_rows(const Tensor& batch, std::size_t b) {
  if (batch.rank() != 3 || batch.dim(2) != 3) {
    throw DimensionError("expected [B,N,3] batch, got " +
                         shape_string(batch.shape()));
  }
  const std::size_t n = batch.dim(1);
  std::vector<Point3f> pts(n);
  const float* base = batch.data() + b * n * 3;
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = {base[3 * i], base[3 * i + 1], base[3 * i + 2]};
  }
  return PointCloud(std::move(pts));
}

double Bounds::diagonal() const {
  const double dx = max[0] - min[0], dy = max[1] - min[1],
               dz = max[2] - min[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Bounds bounding_box(std::span<const Point3f> points) {
  Bounds b;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  b.min = {kInf, kInf, kInf};
  b.max = {-kInf, -kInf, -kInf};
  for (const Point3f& p : points) {
    for (int a = 0; a < 3; ++a) {
      b.min[a] = std::min(b.min[a], static_cast<double>(p[a]));
      b.max[a] = std::max(b.max[a], static_cast<double>(p[a]));
    }
  }
  return b;
}

Tensor to_channels(std::span<const PointCloud> clouds) {
  if (clouds.empty()) throw DimensionError("to_channels: no clouds");
  const std::size_t n = clouds.front().size();
  Tensor batch({clouds.size(), 3, n});
  for (std::size_t b = 0; b < clouds.size(); ++b) {
    if (clouds[b].size() != n) {
      throw DimensionError("to_channels: clouds differ in point count");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < 3; ++a) batch.at(b, a, i) = clouds[b][i][a];
    }
  }
  return batch;
}

}  // namespace prae
