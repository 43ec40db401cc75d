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

#ifndef PRAE_CHECKPOINT_H_
#define PRAE_CHECKPOINT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prae/adam.h"
#include "prae/model.h"

namespace prae {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Optimizer and loop state needed to continue training bit for bit.
struct TrainingState {
  std::uint64_t epoch = 0;  // completed epochs
  AdamHyper hyper;
  std::vector<AdamState<float>> adam;  // parallel to Model::parameters()
  std::string rng_state;               // textual std::mt19937_64 state
  std::string metadata_json = "{}";    // caller-owned (history, best epoch)
};

struct Checkpoint {
  Model model;
  std::optional<TrainingState> training;
};

// Layout (little endian):
//   "PRAE" | u32 version | u32 header length | JSON header |
//   { u64 byte length | float32 values }* | u32 CRC-32
// The CRC covers every byte before it. Blobs follow the header's "blobs"
// list: parameters, then batch-norm running statistics, then Adam first
// and second moments per parameter.
void save_checkpoint(const std::string& path, Model& model,
                     const TrainingState* training = nullptr);

// Throws ChecksumError on CRC mismatch and IoError on a missing, truncated
// or malformed file or an unsupported version. Never returns a partial
// model.
Checkpoint load_checkpoint(const std::string& path);

// Serialized bytes, for callers that checksum or compare checkpoints.
std::vector<std::uint8_t> serialize_checkpoint(Model& model,
                                               const TrainingState* training);
Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes,
                                  const std::string& source = "<memory>");

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);
std::uint32_t file_crc32(const std::string& path);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
// Writes through a temporary file and renames it into place.
void write_file_bytes(const std::string& path,
                      std::span<const std::uint8_t> bytes);

}  // namespace prae

#endif  // PRAE_CHECKPOINT_H_
