// Copyright 2026 The S2DN Authors. All Rights Reserved.
//
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

// Checkpoint container:
//
//   "S2DNCKPT"               8 bytes magic
//   u32 version              little-endian, currently 1
//   u64 header_length        little-endian
//   header                   JSON: {"config", "num_relations", "relations",
//                                   "tensors": [{"name","rows","cols"}...]}
//   tensor data              f64 little-endian, row-major, header order

#ifndef S2DN_CHECKPOINT_HPP_
#define S2DN_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "s2dn/kg_store.hpp"
#include "s2dn/model.hpp"

namespace s2dn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const S2DNModel& model, const Vocabulary& relations,
                     std::ostream& out);
void save_checkpoint(const S2DNModel& model, const Vocabulary& relations,
                     const std::filesystem::path& path);

struct LoadedCheckpoint {
  S2DNModel model;
  Vocabulary relations;
};

// Rebuilds the model from the stored config. Throws CheckpointError on a
// bad magic, unsupported version, truncation or inconsistent tensors.
LoadedCheckpoint load_checkpoint(std::istream& in);
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

// Loads tensors into an existing model; every tensor must match by name and
// shape.
void load_checkpoint_into(S2DNModel& model, std::istream& in);
void load_checkpoint_into(S2DNModel& model, const std::filesystem::path& path);

}  // namespace s2dn

#endif  // S2DN_CHECKPOINT_HPP_
