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

#ifndef PRAE_DATASET_H_
#define PRAE_DATASET_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "prae/geometry.h"
#include "prae/tensor.h"

namespace prae {

enum class Split { kTrain, kVal, kTest };

const char* split_name(Split s);
Split parse_split(const std::string& name);

struct Dataset {
  std::vector<PointCloud> clouds;
  std::vector<int> labels;   // empty or one per cloud
  std::vector<Split> split;  // empty until split_dataset
  std::string manifest_json = "{}";

  std::size_t size() const { return clouds.size(); }
  // Shared point count K; 0 for an empty dataset.
  std::size_t points_per_cloud() const;
  std::vector<std::size_t> indices(Split s) const;
  // Throws ConfigError unless every cloud has the same non-zero size.
  void validate() const;
};

// Centroid to the origin, then scale so the farthest point lies on the unit
// sphere. Computed in double. Throws NumericError for an empty cloud or one
// whose points all coincide.
PointCloud normalize(const PointCloud& cloud);

enum class Primitive { kSphere, kBox, kCylinder, kTorus, kCone, kCompositeUnion };

const char* primitive_name(Primitive p);
Primitive parse_primitive(const std::string& name);

struct Pose {
  std::array<double, 3> euler{0, 0, 0};  // radians, applied z, then y, then x
  std::array<double, 3> translation{0, 0, 0};
};

// Size parameters by primitive:
//   sphere    {radius}
//   box       {half_x, half_y, half_z}
//   cylinder  {radius, half_height}
//   torus     {major_radius, minor_radius}
//   cone      {base_radius, height}
// A composite samples the union of its parts' surfaces.
struct ShapeRecipe {
  Primitive primitive = Primitive::kSphere;
  std::array<double, 3> size{1, 1, 1};
  Pose pose;
  std::vector<ShapeRecipe> parts;
  std::uint64_t seed = 0;
  int label = 0;
};

// Throws ConfigError for non-positive sizes or an empty composite.
void validate(const ShapeRecipe& recipe);
double surface_area(const ShapeRecipe& recipe);

// K surface samples, area-proportional, posed, not normalized.
std::vector<Point3<double>> sample_surface(const ShapeRecipe& recipe,
                                           std::size_t count,
                                           std::mt19937_64& rng);

// One normalized cloud of exactly K points per recipe; deterministic in
// (recipes, K, seed).
Dataset generate_synthetic(std::span<const ShapeRecipe> recipes,
                           std::size_t points, std::uint64_t seed);

inline constexpr int kDeskCategories = 8;
const char* desk_category_name(int label);

// `instances` randomized recipes (size and pose) for each of the eight
// desk categories: sphere, box, cylinder, torus, cone, dumbbell, table,
// snowman.
std::vector<ShapeRecipe> desk_recipes(std::size_t instances,
                                      std::uint64_t seed,
                                      std::span<const int> categories = {});

enum class CloudFormat { kAsciiXYZ, kAsciiPLY, kPackedBinary };

CloudFormat parse_cloud_format(const std::string& name);
// From the file extension (.xyz/.txt, .ply, .pcds/.bin).
CloudFormat format_from_path(const std::string& path);
// For an existing input: a file by extension, a directory by the first
// recognised file in name order. IoError when nothing is there.
CloudFormat infer_input_format(const std::string& path);

inline constexpr std::uint32_t kPackedVersion = 1;

// PackedBinary: "PCDS" | u32 version | u32 cloud count | u32 K |
// cloud-major float32 xyz triples | u32 CRC-32 of all preceding bytes.
void write_packed(const std::string& path, std::span<const PointCloud> clouds);
std::vector<PointCloud> read_packed(const std::string& path);

void write_xyz(const std::string& path, const PointCloud& cloud);
PointCloud read_xyz(const std::string& path);
void write_ply(const std::string& path, const PointCloud& cloud);
PointCloud read_ply(const std::string& path);

// Loads a file, or every file of the format in a directory (sorted by
// name). Every cloud must have `expected_points` points (or, if unset, as
// many as the first one); mismatches throw IoError naming the file.
Dataset load_clouds(const std::string& path, CloudFormat format,
                    std::optional<std::size_t> expected_points = {});

// Deterministic shuffle-then-partition. `fractions` is {train, test} or
// {train, val, test} and must sum to 1 within 1e-9. Non-train parts get
// floor(f * n) clouds, train gets the remainder. Throws ConfigError if a
// part with a positive fraction would be empty.
void split_dataset(Dataset& dataset, std::span<const double> fractions,
                   std::uint64_t seed);

struct Batch {
  std::vector<std::size_t> indices;
  Tensor points;  // [B,3,K]
};

// Mini-batches of one split, reshuffled per (seed, epoch); the final
// partial batch is kept.
std::vector<Batch> batches(const Dataset& dataset, Split split,
                           std::size_t batch_size, std::uint64_t seed,
                           std::uint64_t epoch);

}  // namespace prae

#endif  // PRAE_DATASET_H_
