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

#include "prae/dataset.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "binary_io.h"
#include "prae/checkpoint.h"
#include "prae/error.h"

namespace prae {
namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(c));
  return s;
}

std::vector<Point3f> finite_points(std::vector<Point3f> pts,
                                   const std::string& source) {
  for (const Point3f& p : pts) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2])) {
      throw IoError(source + ": non-finite coordinate");
    }
  }
  return pts;
}

std::string format_coord(float v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  write_file_bytes(path, std::span<const std::uint8_t>(
                             reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
}

std::string read_text(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

bool parse_float(const std::string& token, float& out) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') return false;
  out = static_cast<float>(v);
  return true;
}

}  // namespace

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "?";
}

Split parse_split(const std::string& name) {
  const std::string key = lower(name);
  if (key == "train") return Split::kTrain;
  if (key == "val" || key == "validation") return Split::kVal;
  if (key == "test") return Split::kTest;
  throw ConfigError("unknown split '" + name + "' (train, val, test)");
}

std::size_t Dataset::points_per_cloud() const {
  return clouds.empty() ? 0 : clouds.front().size();
}

std::vector<std::size_t> Dataset::indices(Split s) const {
  if (split.size() != clouds.size()) {
    throw ConfigError("dataset has no split assignment");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == s) out.push_back(i);
  }
  return out;
}

void Dataset::validate() const {
  if (clouds.empty()) throw ConfigError("dataset is empty");
  const std::size_t k = points_per_cloud();
  if (k == 0) throw ConfigError("dataset clouds are empty");
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    if (clouds[i].size() != k) {
      throw ConfigError("cloud " + std::to_string(i) + " has " +
                        std::to_string(clouds[i].size()) + " points, expected " +
                        std::to_string(k));
    }
  }
  if (!labels.empty() && labels.size() != clouds.size()) {
    throw ConfigError("label count does not match cloud count");
  }
}

PointCloud normalize(const PointCloud& cloud) {
  if (cloud.empty()) throw NumericError("cannot normalize an empty cloud");
  std::array<double, 3> c{0, 0, 0};
  for (const Point3f& p : cloud.points()) {
    for (int a = 0; a < 3; ++a) c[a] += p[a];
  }
  for (double& v : c) v /= static_cast<double>(cloud.size());
  double radius = 0.0;
  for (const Point3f& p : cloud.points()) {
    double r2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double d = p[a] - c[a];
      r2 += d * d;
    }
    radius = std::max(radius, r2);
  }
  radius = std::sqrt(radius);
  if (!(radius > 0.0)) {
    throw NumericError("cannot normalize: all points coincide (zero scale)");
  }
  std::vector<Point3f> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      out[i][a] = static_cast<float>((cloud[i][a] - c[a]) / radius);
    }
  }
  return PointCloud(std::move(out));
}

CloudFormat parse_cloud_format(const std::string& name) {
  const std::string key = lower(name);
  if (key == "xyz" || key == "asciixyz") return CloudFormat::kAsciiXYZ;
  if (key == "ply" || key == "asciiply") return CloudFormat::kAsciiPLY;
  if (key == "pcds" || key == "packed" || key == "packedbinary") {
    return CloudFormat::kPackedBinary;
  }
  throw ConfigError("unknown cloud format '" + name + "' (xyz, ply, pcds)");
}

CloudFormat format_from_path(const std::string& path) {
  const std::string ext = lower(std::filesystem::path(path).extension().string());
  if (ext == ".xyz" || ext == ".txt") return CloudFormat::kAsciiXYZ;
  if (ext == ".ply") return CloudFormat::kAsciiPLY;
  if (ext == ".pcds" || ext == ".bin") return CloudFormat::kPackedBinary;
  throw ConfigError("cannot infer cloud format from '" + path + "'");
}

CloudFormat infer_input_format(const std::string& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw IoError("cannot open '" + path + "'");
  if (!fs::is_directory(path)) return format_from_path(path);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file()) names.push_back(entry.path().string());
  }
  std::sort(names.begin(), names.end());
  for (const std::string& name : names) {
    try {
      return format_from_path(name);
    } catch (const ConfigError&) {
    }
  }
  throw IoError(path + ": no cloud files found");
}

void write_packed(const std::string& path, std::span<const PointCloud> clouds) {
  const std::size_t k = clouds.empty() ? 0 : clouds.front().size();
  for (const PointCloud& c : clouds) {
    if (c.size() != k) {
      throw DimensionError("packed format requires equal-size clouds");
    }
  }
  internal::ByteWriter w;
  w.bytes("PCDS", 4);
  w.uint<std::uint32_t>(kPackedVersion);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(clouds.size()));
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(k));
  for (const PointCloud& c : clouds) {
    const auto pts = c.points();
    w.floats(std::span<const float>(pts.data()->data(), pts.size() * 3));
  }
  internal::append_crc(w.buffer());
  write_file_bytes(path, w.buffer());
}

std::vector<PointCloud> read_packed(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  internal::ByteReader head(bytes, path);
  const auto magic = head.take(4);
  if (std::string(magic.begin(), magic.end()) != "PCDS") {
    throw IoError(path + ": not a packed cloud file (bad magic)");
  }
  const std::uint32_t version = head.uint<std::uint32_t>();
  if (version != kPackedVersion) {
    throw IoError(path + ": unsupported packed version " +
                  std::to_string(version));
  }
  const auto covered = internal::verify_trailing_crc(bytes, path);
  internal::ByteReader r(covered, path);
  r.take(8);
  const std::uint32_t count = r.uint<std::uint32_t>();
  const std::uint32_t k = r.uint<std::uint32_t>();
  if (r.remaining() != std::size_t{count} * k * 3 * sizeof(float)) {
    throw IoError(path + ": payload size does not match header");
  }
  std::vector<PointCloud> clouds;
  clouds.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::vector<Point3f> pts(k);
    r.floats(std::span<float>(pts.data()->data(), std::size_t{k} * 3));
    clouds.emplace_back(finite_points(std::move(pts), path));
  }
  return clouds;
}

void write_xyz(const std::string& path, const PointCloud& cloud) {
  std::string text;
  for (const Point3f& p : cloud.points()) {
    text += format_coord(p[0]) + " " + format_coord(p[1]) + " " +
            format_coord(p[2]) + "\n";
  }
  write_text(path, text);
}

PointCloud read_xyz(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<Point3f> pts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;) tokens.push_back(t);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    Point3f p;
    if (tokens.size() != 3 || !parse_float(tokens[0], p[0]) ||
        !parse_float(tokens[1], p[1]) || !parse_float(tokens[2], p[2])) {
      throw IoError(path + ":" + std::to_string(line_no) +
                    ": expected 'x y z'");
    }
    pts.push_back(p);
  }
  return PointCloud(finite_points(std::move(pts), path));
}

void write_ply(const std::string& path, const PointCloud& cloud) {
  std::string text = "ply\nformat ascii 1.0\nelement vertex " +
                     std::to_string(cloud.size()) +
                     "\nproperty float x\nproperty float y\nproperty float z\n"
                     "end_header\n";
  for (const Point3f& p : cloud.points()) {
    text += format_coord(p[0]) + " " + format_coord(p[1]) + " " +
            format_coord(p[2]) + "\n";
  }
  write_text(path, text);
}

PointCloud read_ply(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  auto malformed = [&](const std::string& what) {
    return IoError(path + ": malformed PLY header: " + what);
  };
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) {
    throw malformed("missing 'ply' magic");
  }
  std::size_t vertices = 0;
  bool have_vertex = false, in_vertex = false;
  std::vector<std::string> props;
  std::vector<std::pair<std::string, std::size_t>> elements;
  bool ended = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") throw IoError(path + ": only ASCII PLY is supported");
    } else if (kw == "element") {
      std::string name;
      std::size_t n = 0;
      if (!(ls >> name >> n)) throw malformed("bad element line");
      elements.emplace_back(name, n);
      in_vertex = name == "vertex";
      if (in_vertex) {
        if (have_vertex) throw malformed("duplicate vertex element");
        have_vertex = true;
        vertices = n;
      }
    } else if (kw == "property") {
      std::string type, name;
      ls >> type;
      if (type == "list") {
        std::string a, b;
        ls >> a >> b;
      }
      ls >> name;
      if (in_vertex) props.push_back(name);
    } else if (kw == "end_header") {
      ended = true;
      break;
    } else if (kw != "comment" && kw != "obj_info" && !kw.empty()) {
      throw malformed("unexpected '" + kw + "'");
    }
  }
  if (!ended) throw malformed("missing end_header");
  if (!have_vertex) throw malformed("no vertex element");
  std::array<std::size_t, 3> col{};
  for (int a = 0; a < 3; ++a) {
    const std::string want(1, static_cast<char>('x' + a));
    const auto it = std::find(props.begin(), props.end(), want);
    if (it == props.end()) throw malformed("missing property " + want);
    col[a] = static_cast<std::size_t>(it - props.begin());
  }
  // Elements listed before the vertex block are skipped line by line.
  for (const auto& [name, n] : elements) {
    if (name == "vertex") break;
    for (std::size_t i = 0; i < n; ++i) std::getline(in, line);
  }
  std::vector<Point3f> pts;
  pts.reserve(vertices);
  for (std::size_t i = 0; i < vertices; ++i) {
    if (!std::getline(in, line)) {
      throw IoError(path + ": header declares " + std::to_string(vertices) +
                    " vertices but only " + std::to_string(i) + " present");
    }
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;) tokens.push_back(t);
    Point3f p;
    for (int a = 0; a < 3; ++a) {
      if (col[a] >= tokens.size() || !parse_float(tokens[col[a]], p[a])) {
        throw IoError(path + ": bad vertex line " + std::to_string(i));
      }
    }
    pts.push_back(p);
  }
  return PointCloud(finite_points(std::move(pts), path));
}

Dataset load_clouds(const std::string& path, CloudFormat format,
                    std::optional<std::size_t> expected_points) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (!entry.is_regular_file()) continue;
      try {
        if (format_from_path(entry.path().string()) == format) {
          files.push_back(entry.path().string());
        }
      } catch (const ConfigError&) {
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError(path + ": no cloud files found");
  } else {
    if (!fs::exists(path)) throw IoError("cannot open '" + path + "'");
    files.push_back(path);
  }

  Dataset ds;
  std::vector<std::string> sources;
  for (const std::string& file : files) {
    std::vector<PointCloud> loaded;
    switch (format) {
      case CloudFormat::kPackedBinary:
        loaded = read_packed(file);
        break;
      case CloudFormat::kAsciiXYZ:
        loaded.push_back(read_xyz(file));
        break;
      case CloudFormat::kAsciiPLY:
        loaded.push_back(read_ply(file));
        break;
    }
    for (PointCloud& c : loaded) {
      if (!expected_points) expected_points = c.size();
      if (c.size() != *expected_points || c.empty()) {
        throw IoError(file + ": point count " + std::to_string(c.size()) +
                      " does not match expected K=" +
                      std::to_string(*expected_points));
      }
      ds.clouds.push_back(std::move(c));
    }
    sources.push_back(file);
  }
  nlohmann::json manifest = {{"source", "files"},
                             {"files", sources},
                             {"points", expected_points.value_or(0)},
                             {"normalized", false}};
  ds.manifest_json = manifest.dump();
  return ds;
}

void split_dataset(Dataset& dataset, std::span<const double> fractions,
                   std::uint64_t seed) {
  if (fractions.size() != 2 && fractions.size() != 3) {
    throw ConfigError("split fractions must be {train, test} or {train, val, test}");
  }
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw ConfigError("split fractions must be non-negative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
  const std::size_t n = dataset.size();
  std::vector<Split> parts = fractions.size() == 2
                                 ? std::vector<Split>{Split::kTrain, Split::kTest}
                                 : std::vector<Split>{Split::kTrain, Split::kVal,
                                                      Split::kTest};
  std::vector<std::size_t> counts(parts.size(), 0);
  std::size_t assigned = 0;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    counts[i] = static_cast<std::size_t>(
        std::floor(fractions[i] * static_cast<double>(n) + 1e-9));
    assigned += counts[i];
  }
  if (assigned > n) throw ConfigError("split sizes exceed dataset size");
  counts[0] = n - assigned;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (fractions[i] > 0.0 && counts[i] == 0) {
      throw ConfigError(std::string("split '") + split_name(parts[i]) +
                        "' would be empty for " + std::to_string(n) + " clouds");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    0x5b17u};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  dataset.split.assign(n, Split::kTrain);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t k = 0; k < counts[i]; ++k) {
      dataset.split[order[pos++]] = parts[i];
    }
  }
}

std::vector<Batch> batches(const Dataset& dataset, Split split,
                           std::size_t batch_size, std::uint64_t seed,
                           std::uint64_t epoch) {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  std::vector<std::size_t> idx = dataset.indices(split);
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(epoch >> 32)};
  std::mt19937_64 rng(seq);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<Batch> out;
  for (std::size_t start = 0; start < idx.size(); start += batch_size) {
    Batch b;
    const std::size_t end = std::min(idx.size(), start + batch_size);
    b.indices.assign(idx.begin() + static_cast<std::ptrdiff_t>(start),
                     idx.begin() + static_cast<std::ptrdiff_t>(end));
    std::vector<PointCloud> clouds;
    for (std::size_t i : b.indices) clouds.push_back(dataset.clouds[i]);
    b.points = to_channels(clouds);
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace prae
