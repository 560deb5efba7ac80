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

#ifndef SOCIALMASK__MODEL__FUSION_HPP_
#define SOCIALMASK__MODEL__FUSION_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socialmask/core/graph.hpp"
#include "socialmask/core/param_store.hpp"
#include "socialmask/core/rng.hpp"
#include "socialmask/scene/batch.hpp"
#include "socialmask/scene/grid.hpp"

namespace socialmask
{

enum class FusionKind {
  Scnn,  ///< masked social map through two convolutions
  Sp,    ///< masked social map summed over cells
  Con,   ///< nearest neighbors concatenated
  None,  ///< zero social embedding (encoder-decoder baseline)
};

enum class MaskKind {
  Attention,  ///< softmax(FC(target encoding))
  Uniform,    ///< every cell 1 / k^2
};

std::string_view to_string(FusionKind kind);
std::optional<FusionKind> parse_fusion_kind(std::string_view name);
std::string_view to_string(MaskKind kind);
std::optional<MaskKind> parse_mask_kind(std::string_view name);

struct FusionConfig
{
  FusionKind kind = FusionKind::Scnn;
  MaskKind mask = MaskKind::Attention;
  std::size_t k = 11;
  /// Encoding length per cell (c of the (k, k, c) map).
  std::size_t channels = 20;
  std::size_t embedding = 20;
  std::size_t conv1_channels = 64;
  std::size_t conv2_channels = 16;
  /// Neighbor slots of the concatenation fuser.
  std::size_t con_slots = 8;

  /// Whether the configuration reads the attention mask.
  bool uses_mask_fc() const
  {
    return mask == MaskKind::Attention && (kind == FusionKind::Scnn || kind == FusionKind::Sp);
  }
};

/// Registers the parameters `config` needs: "fusion.mask_fc.*" when the
/// attention mask is used, then "fusion.{conv1,conv2,embed_fc}.*" (SCNN),
/// "fusion_sp.embed_fc.*" (SP) or "fusion_con.embed_fc.*" (CON).
void init_fusion_params(ParamStore<float> & params, const FusionConfig & config, Rng & rng);

/// (k, k, c) map with each encoding at its cell and zeros elsewhere.
/// Duplicate or out-of-range cells throw std::invalid_argument.
template <typename T>
Var social_map(
  Graph<T> & g, const std::vector<Var> & encodings, const std::vector<GridCell> & cells,
  const FusionConfig & config);

/// (k, k) probabilities: softmax over a dense layer of the target encoding.
template <typename T>
Var attention_mask(Graph<T> & g, Var target_encoding, const FusionConfig & config);

template <typename T>
Var uniform_mask(Graph<T> & g, const FusionConfig & config);

/// Intermediate activations of fuse_scnn, for inspection and tests.
struct ScnnTrace
{
  Var masked;  // (k, k, c)
  Var conv1;   // (6, 6, 64) before ReLU
  Var relu1;
  Var conv2;   // (3, 3, 16)
  Var pooled;  // (1, 1, 16)
};

/// Masked map -> conv(k3, s2, p1) + ReLU -> conv(k5, s2, p2) -> maxpool(2, 2)
/// -> dense to the embedding size.
template <typename T>
Var fuse_scnn(Graph<T> & g, Var map, Var mask, const FusionConfig & config, ScnnTrace * trace = nullptr);

/// Masked map summed over cells, then a dense layer.
template <typename T>
Var fuse_sp(Graph<T> & g, Var map, Var mask, const FusionConfig & config);

/// The first `con_slots` encodings (callers pass them nearest first),
/// zero-padded, concatenated, then a dense layer. `dropped` receives the
/// number of encodings beyond the budget.
template <typename T>
Var fuse_con(Graph<T> & g, const std::vector<Var> & encodings, const FusionConfig & config,
             std::size_t * dropped = nullptr);

/// Target encoding followed by the social embedding.
template <typename T>
Var fuse(Graph<T> & g, Var target_encoding, Var social_embedding);

struct SocialResult
{
  Var embedding;
  Var mask;  // invalid unless the fuser uses a mask
  Var map;   // invalid unless the fuser builds a map
  ScnnTrace trace;
  std::size_t dropped = 0;
};

/// Social embedding of batch row `row` from its per-slot neighbor encodings
/// (invalid Vars for masked slots).
template <typename T>
SocialResult social_embedding(
  Graph<T> & g, Var target_encoding, const std::vector<Var> & neighbor_encodings, const SceneBatch & batch,
  std::size_t row, const FusionConfig & config);

}  // namespace socialmask

#endif  // SOCIALMASK__MODEL__FUSION_HPP_
