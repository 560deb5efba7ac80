// Copyright 2026 The socialmask Authors
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

#ifndef SOCIALMASK__CORE__CHECKPOINT_HPP_
#define SOCIALMASK__CORE__CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "socialmask/core/param_store.hpp"

namespace socialmask
{

// Binary layout, all integers little-endian:
//
//   char[8]  tag "SMCKPT01"
//   u32      format version
//   u64      metadata length, then that many bytes of UTF-8 JSON
//   u64      parameter count
//   per parameter, in lexicographic name order:
//     u64    name length, then the UTF-8 name
//     u64    rank, then rank x u64 dims
//     f32    data, row-major
inline constexpr std::string_view kCheckpointTag = "SMCKPT01";
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint
{
  /// Free-form JSON describing how the parameters were produced (model
  /// configuration, input scaling). Opaque to this layer.
  std::string metadata;
  ParamStore<float> params;
};

std::string encode_checkpoint(const Checkpoint & checkpoint);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path & path, const Checkpoint & checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path & path);

}  // namespace socialmask

#endif  // SOCIALMASK__CORE__CHECKPOINT_HPP_
