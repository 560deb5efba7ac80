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

#include "socialmask/core/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace socialmask
{
namespace
{

void put_u64(std::string & out, std::uint64_t v)
{
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
  }
}

void put_u32(std::string & out, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
  }
}

class Reader
{
public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n, const char * what)
  {
    if (bytes_.size() - pos_ < n) {
      throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
    }
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint64_t u64(const char * what)
  {
    const auto b = take(8, what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
      v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
    }
    return v;
  }

  std::uint32_t u32(const char * what)
  {
    const auto b = take(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
    }
    return v;
  }

  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const Checkpoint & checkpoint)
{
  std::string out;
  out.append(kCheckpointTag);
  put_u32(out, kCheckpointVersion);
  put_u64(out, checkpoint.metadata.size());
  out.append(checkpoint.metadata);
  put_u64(out, checkpoint.params.size());
  for (const auto & [name, value] : checkpoint.params.values()) {
    put_u64(out, name.size());
    out.append(name);
    put_u64(out, value.rank());
    for (const auto d : value.shape()) {
      put_u64(out, d);
    }
    for (const float f : value.data()) {
      put_u32(out, std::bit_cast<std::uint32_t>(f));
    }
  }
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes)
{
  Reader in(bytes);
  if (in.take(kCheckpointTag.size(), "format tag") != kCheckpointTag) {
    throw CheckpointError("not a checkpoint: bad format tag");
  }
  const auto version = in.u32("version");
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  const auto meta_len = in.u64("metadata length");
  ckpt.metadata = std::string(in.take(meta_len, "metadata"));
  const auto count = in.u64("parameter count");
  for (std::uint64_t p = 0; p < count; ++p) {
    const auto name_len = in.u64("name length");
    std::string name(in.take(name_len, "parameter name"));
    const auto rank = in.u64("rank");
    if (rank > 8) {
      throw CheckpointError("parameter '" + name + "' has implausible rank " + std::to_string(rank));
    }
    Shape shape;
    for (std::uint64_t r = 0; r < rank; ++r) {
      shape.push_back(static_cast<std::size_t>(in.u64("dimension")));
    }
    const std::size_t n = shape_numel(shape);
    if (n > in.remaining() / 4) {
      throw CheckpointError("checkpoint truncated in data of parameter '" + name + "'");
    }
    std::vector<float> data(n);
    for (std::size_t i = 0; i < n; ++i) {
      data[i] = std::bit_cast<float>(in.u32("parameter data"));
    }
    try {
      ckpt.params.add(name, Tensor<float>(std::move(shape), std::move(data)));
    } catch (const std::invalid_argument & e) {
      throw CheckpointError(std::string("invalid checkpoint entry: ") + e.what());
    }
  }
  if (!in.done()) {
    throw CheckpointError("trailing bytes after checkpoint payload");
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path & path, const Checkpoint & checkpoint)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw CheckpointError("cannot open '" + path.string() + "' for writing");
  }
  const std::string bytes = encode_checkpoint(checkpoint);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw CheckpointError("failed writing '" + path.string() + "'");
  }
}

Checkpoint load_checkpoint(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace socialmask
