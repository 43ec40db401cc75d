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

#include "prae/checkpoint.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "binary_io.h"
#include "prae/error.h"

namespace prae {
namespace {

using json = nlohmann::json;
using internal::ByteReader;
using internal::ByteWriter;

constexpr char kMagic[4] = {'P', 'R', 'A', 'E'};

struct BlobSlot {
  std::string name;
  BasicTensor<float>* tensor;
};

// Fixed declaration order shared by save and load.
std::vector<BlobSlot> blob_slots(Model& model, TrainingState* training) {
  std::vector<BlobSlot> slots;
  for (const ParamRef<float>& p : model.parameters()) {
    slots.push_back({p.name, p.value});
  }
  for (const BufferRef<float>& b : model.buffers()) {
    slots.push_back({b.name, b.value});
  }
  if (training) {
    auto params = model.parameters();
    for (std::size_t i = 0; i < training->adam.size(); ++i) {
      slots.push_back({params[i].name + ".adam_m", &training->adam[i].m});
      slots.push_back({params[i].name + ".adam_v", &training->adam[i].v});
    }
  }
  return slots;
}

}  // namespace

namespace internal {

std::span<const std::uint8_t> verify_trailing_crc(
    std::span<const std::uint8_t> bytes, const std::string& source) {
  if (bytes.size() < 4) throw IoError(source + ": truncated file");
  const auto covered = bytes.first(bytes.size() - 4);
  ByteReader tail(bytes.last(4), source);
  const std::uint32_t stored = tail.uint<std::uint32_t>();
  if (stored != crc32_of(covered)) {
    throw ChecksumError(source + ": checksum mismatch (corrupt or truncated)");
  }
  return covered;
}

void append_crc(std::vector<std::uint8_t>& bytes) {
  const std::uint32_t crc = crc32_of(bytes);
  for (int i = 0; i < 4; ++i) {
    bytes.push_back(static_cast<std::uint8_t>(crc >> (8 * i)));
  }
}

}  // namespace internal

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  const std::uint8_t* p = bytes.data();
  std::size_t left = bytes.size();
  while (left > 0) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = crc32(crc, p, chunk);
    p += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path + "'");
  return bytes;
}

void write_file_bytes(const std::string& path,
                      std::span<const std::uint8_t> bytes) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw IoError("write failed for '" + path + "' (disk full?)");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw IoError("cannot move '" + tmp + "' to '" + path + "'");
}

std::uint32_t file_crc32(const std::string& path) {
  return crc32_of(read_file_bytes(path));
}

std::vector<std::uint8_t> serialize_checkpoint(Model& model,
                                               const TrainingState* training) {
  TrainingState copy;
  if (training) copy = *training;
  TrainingState* state = training ? &copy : nullptr;
  if (state && state->adam.size() != model.parameters().size()) {
    throw ProtocolError("checkpoint: optimizer state does not match model");
  }
  const std::vector<BlobSlot> slots = blob_slots(model, state);

  json header;
  header["format_version"] = kCheckpointVersion;
  header["spec"] = json::parse(spec_to_json(model.spec()));
  header["init"] = {{"relu_layers", "he_uniform_fan_in"},
                    {"other_layers", "xavier_uniform"},
                    {"bias", "zeros"}};
  json blobs = json::array();
  for (const BlobSlot& s : slots) {
    blobs.push_back({{"name", s.name}, {"shape", s.tensor->shape()}});
  }
  header["blobs"] = blobs;
  if (state) {
    std::vector<std::uint64_t> steps;
    for (const auto& a : state->adam) steps.push_back(a.step);
    header["training"] = {{"epoch", state->epoch},
                          {"lr", state->hyper.lr},
                          {"beta1", state->hyper.beta1},
                          {"beta2", state->hyper.beta2},
                          {"epsilon", state->hyper.epsilon},
                          {"adam_steps", steps},
                          {"rng_state", state->rng_state},
                          {"metadata", json::parse(state->metadata_json)}};
  }
  const std::string header_text = header.dump();

  ByteWriter w;
  w.bytes(kMagic, 4);
  w.uint<std::uint32_t>(kCheckpointVersion);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(header_text.size()));
  w.bytes(header_text.data(), header_text.size());
  for (const BlobSlot& s : slots) {
    w.uint<std::uint64_t>(s.tensor->size() * sizeof(float));
    w.floats(s.tensor->values());
  }
  internal::append_crc(w.buffer());
  return std::move(w.buffer());
}

void save_checkpoint(const std::string& path, Model& model,
                     const TrainingState* training) {
  write_file_bytes(path, serialize_checkpoint(model, training));
}

Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes,
                                  const std::string& source) {
  if (bytes.size() < 12) throw IoError(source + ": truncated file");
  ByteReader head(bytes, source);
  const auto magic = head.take(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw IoError(source + ": not a checkpoint (bad magic)");
  }
  const auto covered = internal::verify_trailing_crc(bytes, source);
  const std::uint32_t version = head.uint<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw IoError(source + ": unsupported checkpoint version " +
                  std::to_string(version));
  }

  ByteReader r(covered, source);
  r.take(8);
  const std::uint32_t header_len = r.uint<std::uint32_t>();
  const auto header_bytes = r.take(header_len);
  json header;
  try {
    header = json::parse(header_bytes.begin(), header_bytes.end());
  } catch (const json::exception& ex) {
    throw IoError(source + ": malformed header: " + ex.what());
  }

  Checkpoint ckpt;
  try {
    ckpt.model = Model::build(spec_from_json(header.at("spec").dump()), 0);
    if (header.contains("training")) {
      const json& t = header.at("training");
      TrainingState state;
      state.epoch = t.at("epoch").get<std::uint64_t>();
      state.hyper.lr = t.at("lr").get<double>();
      state.hyper.beta1 = t.at("beta1").get<double>();
      state.hyper.beta2 = t.at("beta2").get<double>();
      state.hyper.epsilon = t.at("epsilon").get<double>();
      state.rng_state = t.at("rng_state").get<std::string>();
      state.metadata_json = t.at("metadata").dump();
      const auto steps = t.at("adam_steps").get<std::vector<std::uint64_t>>();
      for (std::uint64_t step : steps) {
        AdamState<float> a;
        a.step = step;
        a.hyper = state.hyper;
        state.adam.push_back(std::move(a));
      }
      ckpt.training = std::move(state);
    }
  } catch (const json::exception& ex) {
    throw IoError(source + ": malformed header: " + ex.what());
  } catch (const ConfigError& ex) {
    throw IoError(source + ": invalid model spec: " + ex.what());
  }

  TrainingState* state = ckpt.training ? &*ckpt.training : nullptr;
  if (state && state->adam.size() != ckpt.model.parameters().size()) {
    throw IoError(source + ": optimizer state does not match the model");
  }
  if (state) {
    auto params = ckpt.model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      state->adam[i].m = Tensor(params[i].value->shape());
      state->adam[i].v = Tensor(params[i].value->shape());
    }
  }
  const std::vector<BlobSlot> slots = blob_slots(ckpt.model, state);
  const json& manifest = header.at("blobs");
  if (manifest.size() != slots.size()) {
    throw IoError(source + ": blob count does not match the model");
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const BlobSlot& s = slots[i];
    if (manifest[i].at("name").get<std::string>() != s.name ||
        manifest[i].at("shape").get<Shape>() != s.tensor->shape()) {
      throw IoError(source + ": blob '" + s.name + "' does not match the model");
    }
    const std::uint64_t len = r.uint<std::uint64_t>();
    if (len != s.tensor->size() * sizeof(float)) {
      throw IoError(source + ": blob '" + s.name + "' has wrong length");
    }
    r.floats(s.tensor->values());
  }
  if (r.remaining() != 0) {
    throw IoError(source + ": trailing bytes after last blob");
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::string& path) {
  return deserialize_checkpoint(read_file_bytes(path), path);
}

}  // namespace prae
