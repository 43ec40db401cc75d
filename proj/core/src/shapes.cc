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

#include <cctype>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "prae/dataset.h"
#include "prae/error.h"

namespace prae {
namespace {

using Vec3 = Point3<double>;
constexpr double kPi = std::numbers::pi;

Vec3 add(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

Vec3 rotate(const Vec3& p, const std::array<double, 3>& euler) {
  // R = Rx(ex) * Ry(ey) * Rz(ez)
  const double cz = std::cos(euler[2]), sz = std::sin(euler[2]);
  const double cy = std::cos(euler[1]), sy = std::sin(euler[1]);
  const double cx = std::cos(euler[0]), sx = std::sin(euler[0]);
  Vec3 a{cz * p[0] - sz * p[1], sz * p[0] + cz * p[1], p[2]};
  Vec3 b{cy * a[0] + sy * a[2], a[1], -sy * a[0] + cy * a[2]};
  return {b[0], cx * b[1] - sx * b[2], sx * b[1] + cx * b[2]};
}

Vec3 apply_pose(const Vec3& p, const Pose& pose) {
  return add(rotate(p, pose.euler), pose.translation);
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  while (true) {
    Vec3 v{normal(rng), normal(rng), normal(rng)};
    const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (len > 1e-12) return scale(v, 1.0 / len);
  }
}

// Antithetic sphere sampling: points come in antipodal pairs (plus one
// 120-degree triple for odd counts), so the sample centroid is the sphere
// center. Each point is still marginally uniform on the sphere.
void sample_sphere(double radius, std::size_t count, std::mt19937_64& rng,
                   std::vector<Vec3>& out) {
  std::size_t left = count;
  if (left % 2 == 1) {
    if (left == 1) {
      out.push_back(scale(random_unit(rng), radius));
      return;
    }
    const Vec3 u = random_unit(rng);
    Vec3 w = random_unit(rng);
    // v = normalize(w - (w.u) u)
    const double dot = w[0] * u[0] + w[1] * u[1] + w[2] * u[2];
    Vec3 v = add(w, scale(u, -dot));
    const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    v = scale(v, 1.0 / len);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    const double t0 = angle(rng);
    for (int k = 0; k < 3; ++k) {
      const double t = t0 + 2.0 * kPi * k / 3.0;
      out.push_back(scale(add(scale(u, std::cos(t)), scale(v, std::sin(t))),
                          radius));
    }
    left -= 3;
  }
  for (std::size_t i = 0; i < left / 2; ++i) {
    const Vec3 u = scale(random_unit(rng), radius);
    out.push_back(u);
    out.push_back(scale(u, -1.0));
  }
}

void sample_box(const std::array<double, 3>& half, std::size_t count,
                std::mt19937_64& rng, std::vector<Vec3>& out) {
  const double ax = half[1] * half[2], ay = half[0] * half[2],
               az = half[0] * half[1];
  std::discrete_distribution<int> face({ax, ax, ay, ay, az, az});
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const int f = face(rng);
    const int axis = f / 2;
    const double sign = f % 2 == 0 ? 1.0 : -1.0;
    Vec3 p;
    for (int a = 0; a < 3; ++a) p[a] = half[a] * unit(rng);
    p[axis] = sign * half[axis];
    out.push_back(p);
  }
}

void sample_cylinder(double r, double half_h, std::size_t count,
                     std::mt19937_64& rng, std::vector<Vec3>& out) {
  const double lateral = 2.0 * kPi * r * 2.0 * half_h;
  const double cap = kPi * r * r;
  std::discrete_distribution<int> part({lateral, cap, cap});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const int which = part(rng);
    const double theta = 2.0 * kPi * unit(rng);
    if (which == 0) {
      const double z = half_h * (2.0 * unit(rng) - 1.0);
      out.push_back({r * std::cos(theta), r * std::sin(theta), z});
    } else {
      const double rho = r * std::sqrt(unit(rng));
      const double z = which == 1 ? half_h : -half_h;
      out.push_back({rho * std::cos(theta), rho * std::sin(theta), z});
    }
  }
}

void sample_torus(double major, double minor, std::size_t count,
                  std::mt19937_64& rng, std::vector<Vec3>& out) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    // Area element is proportional to (major + minor cos v).
    double v;
    do {
      v = 2.0 * kPi * unit(rng);
    } while (unit(rng) * (major + minor) > major + minor * std::cos(v));
    const double u = 2.0 * kPi * unit(rng);
    const double ring = major + minor * std::cos(v);
    out.push_back({ring * std::cos(u), ring * std::sin(u), minor * std::sin(v)});
  }
}

void sample_cone(double r, double h, std::size_t count, std::mt19937_64& rng,
                 std::vector<Vec3>& out) {
  const double slant = std::sqrt(r * r + h * h);
  std::discrete_distribution<int> part({kPi * r * slant, kPi * r * r});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double theta = 2.0 * kPi * unit(rng);
    if (part(rng) == 0) {
      // Distance from the apex has density proportional to itself.
      const double t = std::sqrt(unit(rng));
      out.push_back({r * t * std::cos(theta), r * t * std::sin(theta),
                     h * (1.0 - t)});
    } else {
      const double rho = r * std::sqrt(unit(rng));
      out.push_back({rho * std::cos(theta), rho * std::sin(theta), 0.0});
    }
  }
}

ShapeRecipe make_part(Primitive p, std::array<double, 3> size,
                      std::array<double, 3> offset) {
  ShapeRecipe part;
  part.primitive = p;
  part.size = size;
  part.pose.translation = offset;
  return part;
}

}  // namespace

const char* primitive_name(Primitive p) {
  switch (p) {
    case Primitive::kSphere:
      return "sphere";
    case Primitive::kBox:
      return "box";
    case Primitive::kCylinder:
      return "cylinder";
    case Primitive::kTorus:
      return "torus";
    case Primitive::kCone:
      return "cone";
    case Primitive::kCompositeUnion:
      return "composite";
  }
  return "?";
}

Primitive parse_primitive(const std::string& name) {
  std::string key;
  for (char c : name) key.push_back(static_cast<char>(std::tolower(c)));
  for (Primitive p : {Primitive::kSphere, Primitive::kBox, Primitive::kCylinder,
                      Primitive::kTorus, Primitive::kCone,
                      Primitive::kCompositeUnion}) {
    if (key == primitive_name(p)) return p;
  }
  throw ConfigError("unknown primitive '" + name + "'");
}

void validate(const ShapeRecipe& recipe) {
  const auto& s = recipe.size;
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  bool ok = true;
  switch (recipe.primitive) {
    case Primitive::kSphere:
      ok = positive(s[0]);
      break;
    case Primitive::kBox:
      ok = positive(s[0]) && positive(s[1]) && positive(s[2]);
      break;
    case Primitive::kCylinder:
    case Primitive::kCone:
      ok = positive(s[0]) && positive(s[1]);
      break;
    case Primitive::kTorus:
      ok = positive(s[0]) && positive(s[1]);
      break;
    case Primitive::kCompositeUnion:
      if (recipe.parts.empty()) throw ConfigError("composite has no parts");
      for (const ShapeRecipe& part : recipe.parts) validate(part);
      break;
  }
  if (!ok) {
    throw ConfigError(std::string("invalid ") + primitive_name(recipe.primitive) +
                      " parameters: sizes must be positive");
  }
}

double surface_area(const ShapeRecipe& recipe) {
  const auto& s = recipe.size;
  switch (recipe.primitive) {
    case Primitive::kSphere:
      return 4.0 * kPi * s[0] * s[0];
    case Primitive::kBox:
      return 8.0 * (s[0] * s[1] + s[1] * s[2] + s[0] * s[2]);
    case Primitive::kCylinder:
      return 4.0 * kPi * s[0] * s[1] + 2.0 * kPi * s[0] * s[0];
    case Primitive::kTorus:
      return 4.0 * kPi * kPi * s[0] * s[1];
    case Primitive::kCone:
      return kPi * s[0] * std::sqrt(s[0] * s[0] + s[1] * s[1]) +
             kPi * s[0] * s[0];
    case Primitive::kCompositeUnion: {
      double total = 0.0;
      for (const ShapeRecipe& p : recipe.parts) total += surface_area(p);
      return total;
    }
  }
  return 0.0;
}

std::vector<Point3<double>> sample_surface(const ShapeRecipe& recipe,
                                           std::size_t count,
                                           std::mt19937_64& rng) {
  validate(recipe);
  std::vector<Vec3> local;
  local.reserve(count);
  const auto& s = recipe.size;
  switch (recipe.primitive) {
    case Primitive::kSphere:
      sample_sphere(s[0], count, rng, local);
      break;
    case Primitive::kBox:
      sample_box(s, count, rng, local);
      break;
    case Primitive::kCylinder:
      sample_cylinder(s[0], s[1], count, rng, local);
      break;
    case Primitive::kTorus:
      sample_torus(s[0], s[1], count, rng, local);
      break;
    case Primitive::kCone:
      sample_cone(s[0], s[1], count, rng, local);
      break;
    case Primitive::kCompositeUnion: {
      std::vector<double> areas;
      for (const ShapeRecipe& p : recipe.parts) areas.push_back(surface_area(p));
      std::discrete_distribution<std::size_t> pick(areas.begin(), areas.end());
      std::vector<std::size_t> per_part(recipe.parts.size(), 0);
      for (std::size_t i = 0; i < count; ++i) ++per_part[pick(rng)];
      for (std::size_t k = 0; k < recipe.parts.size(); ++k) {
        if (per_part[k] == 0) continue;
        auto pts = sample_surface(recipe.parts[k], per_part[k], rng);
        local.insert(local.end(), pts.begin(), pts.end());
      }
      break;
    }
  }
  for (Vec3& p : local) p = apply_pose(p, recipe.pose);
  return local;
}

const char* desk_category_name(int label) {
  static const char* kNames[kDeskCategories] = {
      "sphere", "box", "cylinder", "torus", "cone", "dumbbell", "table",
      "snowman"};
  if (label < 0 || label >= kDeskCategories) return "?";
  return kNames[label];
}

std::vector<ShapeRecipe> desk_recipes(std::size_t instances,
                                      std::uint64_t seed,
                                      std::span<const int> categories) {
  std::vector<int> cats(categories.begin(), categories.end());
  if (cats.empty()) {
    for (int c = 0; c < kDeskCategories; ++c) cats.push_back(c);
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    0x5eedu};
  std::mt19937_64 rng(seq);
  auto u = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  std::vector<ShapeRecipe> recipes;
  for (int cat : cats) {
    if (cat < 0 || cat >= kDeskCategories) {
      throw ConfigError("unknown desk category " + std::to_string(cat));
    }
    for (std::size_t i = 0; i < instances; ++i) {
      ShapeRecipe r;
      switch (cat) {
        case 0:
          r.primitive = Primitive::kSphere;
          r.size = {u(0.5, 1.5), 0, 0};
          break;
        case 1:
          r.primitive = Primitive::kBox;
          r.size = {u(0.3, 1.2), u(0.3, 1.2), u(0.3, 1.2)};
          break;
        case 2:
          r.primitive = Primitive::kCylinder;
          r.size = {u(0.3, 1.0), u(0.3, 1.2), 0};
          break;
        case 3:
          r.primitive = Primitive::kTorus;
          r.size = {u(0.8, 1.2), u(0.15, 0.45), 0};
          break;
        case 4:
          r.primitive = Primitive::kCone;
          r.size = {u(0.4, 1.0), u(0.6, 1.6), 0};
          break;
        case 5: {
          const double len = u(0.6, 1.2), bell = u(0.3, 0.5);
          r.primitive = Primitive::kCompositeUnion;
          r.parts = {make_part(Primitive::kCylinder, {u(0.08, 0.15), len, 0},
                               {0, 0, 0}),
                     make_part(Primitive::kSphere, {bell, 0, 0}, {0, 0, len}),
                     make_part(Primitive::kSphere, {bell, 0, 0}, {0, 0, -len})};
          break;
        }
        case 6: {
          const double w = u(0.6, 1.0), d = u(0.4, 0.8), h = u(0.4, 0.8);
          const double leg = u(0.04, 0.08);
          r.primitive = Primitive::kCompositeUnion;
          r.parts = {make_part(Primitive::kBox, {w, d, 0.05}, {0, 0, h})};
          for (double sx : {-1.0, 1.0}) {
            for (double sy : {-1.0, 1.0}) {
              r.parts.push_back(make_part(Primitive::kCylinder,
                                          {leg, h / 2, 0},
                                          {sx * (w - leg), sy * (d - leg),
                                           h / 2}));
            }
          }
          break;
        }
        case 7: {
          const double a = u(0.5, 0.7), b = u(0.35, 0.5), c = u(0.2, 0.3);
          r.primitive = Primitive::kCompositeUnion;
          r.parts = {make_part(Primitive::kSphere, {a, 0, 0}, {0, 0, 0}),
                     make_part(Primitive::kSphere, {b, 0, 0}, {0, 0, a + b * 0.8}),
                     make_part(Primitive::kSphere, {c, 0, 0},
                               {0, 0, a + 1.6 * b + c * 0.8})};
          break;
        }
      }
      r.pose.euler = {u(-kPi, kPi), u(-kPi, kPi), u(-kPi, kPi)};
      r.pose.translation = {u(-2, 2), u(-2, 2), u(-2, 2)};
      r.seed = rng();
      r.label = cat;
      recipes.push_back(std::move(r));
    }
  }
  return recipes;
}

Dataset generate_synthetic(std::span<const ShapeRecipe> recipes,
                           std::size_t points, std::uint64_t seed) {
  if (points < 1) throw ConfigError("synthetic clouds need K >= 1 points");
  for (const ShapeRecipe& r : recipes) validate(r);
  Dataset ds;
  for (std::size_t i = 0; i < recipes.size(); ++i) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(recipes[i].seed),
        static_cast<std::uint32_t>(recipes[i].seed >> 32)};
    std::mt19937_64 rng(seq);
    std::vector<Vec3> pts = sample_surface(recipes[i], points, rng);
    // Normalize before rounding to float.
    Vec3 centroid{0, 0, 0};
    for (const Vec3& p : pts) centroid = add(centroid, p);
    centroid = scale(centroid, 1.0 / static_cast<double>(pts.size()));
    double radius = 0.0;
    for (Vec3& p : pts) {
      p = add(p, scale(centroid, -1.0));
      radius = std::max(radius, std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
    }
    if (!(radius > 0.0)) {
      throw NumericError("synthetic shape collapsed to a point");
    }
    std::vector<Point3f> out(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
      for (int a = 0; a < 3; ++a) {
        out[k][a] = static_cast<float>(pts[k][a] / radius);
      }
    }
    ds.clouds.emplace_back(std::move(out));
    ds.labels.push_back(recipes[i].label);
  }
  nlohmann::json manifest = {{"source", "synthetic"},
                             {"seed", seed},
                             {"points", points},
                             {"clouds", recipes.size()},
                             {"normalized", true}};
  ds.manifest_json = manifest.dump();
  return ds;
}

}  // namespace prae
