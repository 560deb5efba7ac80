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

#include "socialmask/model/fusion.hpp"

#include <cmath>
#include <stdexcept>

#include "socialmask/core/ops.hpp"

namespace socialmask
{

std::string_view to_string(FusionKind kind)
{
  switch (kind) {
    case FusionKind::Scnn:
      return "scnn";
    case FusionKind::Sp:
      return "sp";
    case FusionKind::Con:
      return "con";
    case FusionKind::None:
      break;
  }
  return "none";
}

std::optional<FusionKind> parse_fusion_kind(std::string_view name)
{
  for (auto k : {FusionKind::Scnn, FusionKind::Sp, FusionKind::Con, FusionKind::None}) {
    if (name == to_string(k)) {
      return k;
    }
  }
  return std::nullopt;
}

std::string_view to_string(MaskKind kind)
{
  return kind == MaskKind::Attention ? "attention" : "uniform";
}

std::optional<MaskKind> parse_mask_kind(std::string_view name)
{
  if (name == "attention") {
    return MaskKind::Attention;
  }
  if (name == "uniform") {
    return MaskKind::Uniform;
  }
  return std::nullopt;
}

namespace
{

Tensor<float> uniform_tensor(Rng & rng, Shape shape, std::size_t fan_in)
{
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor<float> t(std::move(shape));
  for (auto & v : t.data()) {
    v = static_cast<float>(rng.uniform(-bound, bound));
  }
  return t;
}

void add_dense(ParamStore<float> & params, const std::string & prefix, std::size_t in, std::size_t out, Rng & rng)
{
  params.add(prefix + ".weight", uniform_tensor(rng, Shape{out, in}, in));
  params.add(prefix + ".bias", Tensor<float>(Shape{out}));
}

const char * embed_prefix(FusionKind kind)
{
  switch (kind) {
    case FusionKind::Sp:
      return "fusion_sp.embed_fc";
    case FusionKind::Con:
      return "fusion_con.embed_fc";
    default:
      return "fusion.embed_fc";
  }
}

void require_shape(const Shape & got, const Shape & want, const char * what)
{
  if (got != want) {
    throw ShapeError(std::string(what) + ": expected " + format_shape(want) + ", got " + format_shape(got));
  }
}

}  // namespace

void init_fusion_params(ParamStore<float> & params, const FusionConfig & config, Rng & rng)
{
  const std::size_t c = config.channels;
  if (config.uses_mask_fc()) {
    add_dense(params, "fusion.mask_fc", c, config.k * config.k, rng);
  }
  switch (config.kind) {
    case FusionKind::Scnn: {
      const std::size_t c1 = config.conv1_channels;
      const std::size_t c2 = config.conv2_channels;
      params.add("fusion.conv1.kernel", uniform_tensor(rng, Shape{3, 3, c, c1}, 9 * c));
      params.add("fusion.conv1.bias", Tensor<float>(Shape{c1}));
      params.add("fusion.conv2.kernel", uniform_tensor(rng, Shape{5, 5, c1, c2}, 25 * c1));
      params.add("fusion.conv2.bias", Tensor<float>(Shape{c2}));
      add_dense(params, embed_prefix(config.kind), c2, config.embedding, rng);
      break;
    }
    case FusionKind::Sp:
      add_dense(params, embed_prefix(config.kind), c, config.embedding, rng);
      break;
    case FusionKind::Con:
      add_dense(params, embed_prefix(config.kind), config.con_slots * c, config.embedding, rng);
      break;
    case FusionKind::None:
      break;
  }
}

template <typename T>
Var social_map(
  Graph<T> & g, const std::vector<Var> & encodings, const std::vector<GridCell> & cells,
  const FusionConfig & config)
{
  if (encodings.size() != cells.size()) {
    throw std::invalid_argument("social_map: " + std::to_string(encodings.size()) + " encodings but " +
                                std::to_string(cells.size()) + " cells");
  }
  if (encodings.empty()) {
    return g.constant(Tensor<T>(Shape{config.k, config.k, config.channels}));
  }
  for (const Var v : encodings) {
    require_shape(g.shape(v), Shape{config.channels}, "social_map encoding");
  }
  std::vector<std::pair<std::size_t, std::size_t>> rc;
  rc.reserve(cells.size());
  for (const auto & c : cells) {
    rc.emplace_back(c.row, c.col);
  }
  return ops::scatter_cells(g, encodings, rc, config.k);
}

template <typename T>
Var attention_mask(Graph<T> & g, Var target_encoding, const FusionConfig & config)
{
  require_shape(g.shape(target_encoding), Shape{config.channels}, "attention_mask target encoding");
  const Var logits =
    ops::dense(g, target_encoding, g.param("fusion.mask_fc.weight"), g.param("fusion.mask_fc.bias"));
  return ops::reshape(g, ops::softmax(g, logits), Shape{config.k, config.k});
}

template <typename T>
Var uniform_mask(Graph<T> & g, const FusionConfig & config)
{
  const std::size_t n = config.k * config.k;
  return g.constant(Tensor<T>(Shape{config.k, config.k}, T{1} / static_cast<T>(n)));
}

template <typename T>
Var fuse_scnn(Graph<T> & g, Var map, Var mask, const FusionConfig & config, ScnnTrace * trace)
{
  require_shape(g.shape(map), Shape{config.k, config.k, config.channels}, "fuse_scnn map");
  require_shape(g.shape(mask), Shape{config.k, config.k}, "fuse_scnn mask");
  ScnnTrace t;
  t.masked = ops::scale_channels(g, map, mask);
  t.conv1 = ops::conv2d(g, t.masked, g.param("fusion.conv1.kernel"), g.param("fusion.conv1.bias"), Conv2dSpec{2, 1});
  t.relu1 = ops::relu(g, t.conv1);
  t.conv2 = ops::conv2d(g, t.relu1, g.param("fusion.conv2.kernel"), g.param("fusion.conv2.bias"), Conv2dSpec{2, 2});
  t.pooled = ops::maxpool2d(g, t.conv2, 2, 2);
  const Var flat = ops::reshape(g, t.pooled, Shape{g.value(t.pooled).size()});
  const Var out = ops::dense(g, flat, g.param("fusion.embed_fc.weight"), g.param("fusion.embed_fc.bias"));
  if (trace != nullptr) {
    *trace = t;
  }
  return out;
}

template <typename T>
Var fuse_sp(Graph<T> & g, Var map, Var mask, const FusionConfig & config)
{
  require_shape(g.shape(map), Shape{config.k, config.k, config.channels}, "fuse_sp map");
  require_shape(g.shape(mask), Shape{config.k, config.k}, "fuse_sp mask");
  const Var pooled = ops::sum_cells(g, ops::scale_channels(g, map, mask));
  return ops::dense(g, pooled, g.param("fusion_sp.embed_fc.weight"), g.param("fusion_sp.embed_fc.bias"));
}

template <typename T>
Var fuse_con(Graph<T> & g, const std::vector<Var> & encodings, const FusionConfig & config, std::size_t * dropped)
{
  std::vector<Var> parts;
  for (std::size_t i = 0; i < config.con_slots; ++i) {
    if (i < encodings.size()) {
      require_shape(g.shape(encodings[i]), Shape{config.channels}, "fuse_con encoding");
      parts.push_back(encodings[i]);
    } else {
      parts.push_back(g.constant(Tensor<T>(Shape{config.channels})));
    }
  }
  if (dropped != nullptr) {
    *dropped = encodings.size() > config.con_slots ? encodings.size() - config.con_slots : 0;
  }
  return ops::dense(g, ops::concat(g, parts), g.param("fusion_con.embed_fc.weight"),
                    g.param("fusion_con.embed_fc.bias"));
}

template <typename T>
Var fuse(Graph<T> & g, Var target_encoding, Var social_embedding)
{
  return ops::concat(g, {target_encoding, social_embedding});
}

template <typename T>
SocialResult social_embedding(
  Graph<T> & g, Var target_encoding, const std::vector<Var> & neighbor_encodings, const SceneBatch & batch,
  std::size_t row, const FusionConfig & config)
{
  SocialResult r;
  std::vector<Var> valid;
  std::vector<GridCell> cells;
  for (std::size_t j = 0; j < neighbor_encodings.size(); ++j) {
    if (neighbor_encodings[j].valid()) {
      valid.push_back(neighbor_encodings[j]);
      cells.push_back(batch.neighbor_cell[row * batch.max_neighbors + j]);
    }
  }
  switch (config.kind) {
    case FusionKind::Scnn:
    case FusionKind::Sp: {
      r.map = social_map(g, valid, cells, config);
      r.mask = config.mask == MaskKind::Attention ? attention_mask(g, target_encoding, config) : uniform_mask(g, config);
      r.embedding = config.kind == FusionKind::Scnn ? fuse_scnn(g, r.map, r.mask, config, &r.trace)
                                                    : fuse_sp(g, r.map, r.mask, config);
      break;
    }
    case FusionKind::Con:
      r.embedding = fuse_con(g, valid, config, &r.dropped);
      break;
    case FusionKind::None:
      r.embedding = g.constant(Tensor<T>(Shape{config.embedding}));
      break;
  }
  return r;
}

#define SOCIALMASK_INSTANTIATE_FUSION(T)                                                                          \
  template Var social_map<T>(Graph<T> &, const std::vector<Var> &, const std::vector<GridCell> &,                \
                             const FusionConfig &);                                                               \
  template Var attention_mask<T>(Graph<T> &, Var, const FusionConfig &);                                         \
  template Var uniform_mask<T>(Graph<T> &, const FusionConfig &);                                                \
  template Var fuse_scnn<T>(Graph<T> &, Var, Var, const FusionConfig &, ScnnTrace *);                            \
  template Var fuse_sp<T>(Graph<T> &, Var, Var, const FusionConfig &);                                           \
  template Var fuse_con<T>(Graph<T> &, const std::vector<Var> &, const FusionConfig &, std::size_t *);           \
  template Var fuse<T>(Graph<T> &, Var, Var);                                                                    \
  template SocialResult social_embedding<T>(Graph<T> &, Var, const std::vector<Var> &, const SceneBatch &,       \
                                            std::size_t, const FusionConfig &);

SOCIALMASK_INSTANTIATE_FUSION(float)
SOCIALMASK_INSTANTIATE_FUSION(double)

}  // namespace socialmask
