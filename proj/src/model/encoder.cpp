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
#include "socialmask/model/encoder.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "socialmask/core/ops.hpp"

namespace socialmask
{

namespace
{

Tensor<float> uniform_tensor(Rng & rng, Shape shape, double bound)
{
  Tensor<float> t(std::move(shape));
  for (auto & v : t.data()) {
    v = static_cast<float>(rng.uniform(-bound, bound));
  }
  return t;
}

template <typename T>
Tensor<T> one_hot(AgentClass cls)
{
  Tensor<T> t(Shape{kAgentClassCount});
  t[class_index(cls)] = T{1};
  return t;
}

}  // namespace

void init_encoder_params(ParamStore<float> & params, const EncoderConfig & config, Rng & rng)
{
  const std::size_t H = config.hidden;
  const double bound = 1.0 / std::sqrt(static_cast<double>(H));
  params.add("encoder.lstm.input_weight", uniform_tensor(rng, Shape{4 * H, 3}, bound));
  params.add("encoder.lstm.recurrent_weight", uniform_tensor(rng, Shape{4 * H, H}, bound));
  params.add("encoder.lstm.bias", Tensor<float>(Shape{4 * H}));
}

template <typename T>
Var encode_track(
  Graph<T> & g, std::span<const float> positions, std::size_t true_length, AgentClass cls, const Vec3 & origin,
  const EncoderConfig & config)
{
  if (true_length == 0) {
    throw std::invalid_argument("encode_track: true_length must be at least 1");
  }
  if (positions.size() % 3 != 0 || true_length * 3 > positions.size()) {
    throw std::invalid_argument("encode_track: true_length " + std::to_string(true_length) +
                                " exceeds the " + std::to_string(positions.size() / 3) + " given samples");
  }
  const std::size_t H = config.hidden;
  const Var w_ih = g.param("encoder.lstm.input_weight");
  const Var w_hh = g.param("encoder.lstm.recurrent_weight");
  const Var bias = g.param("encoder.lstm.bias");
  const T inv = static_cast<T>(1.0 / config.input_scale);
  const double o[3] = {origin.x, origin.y, origin.z};

  const std::size_t steps = config.variable_length ? true_length : config.fixed_steps;
  Var state = g.constant(Tensor<T>(Shape{2 * H}));
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor<T> x(Shape{3});
    if (t < true_length) {
      for (std::size_t k = 0; k < 3; ++k) {
        x[k] = static_cast<T>(static_cast<double>(positions[t * 3 + k]) - o[k]) * inv;
      }
    }
    state = ops::lstm_step(g, g.constant(std::move(x)), state, w_ih, w_hh, bias);
  }
  return ops::concat(g, {ops::slice(g, state, 0, H), g.constant(one_hot<T>(cls))});
}

Tensor<float> encode_track(
  const Tensor<float> & positions, std::size_t true_length, AgentClass cls, const ParamStore<float> & params,
  const EncoderConfig & config, const Vec3 & origin)
{
  if (positions.rank() != 2 || positions.dim(1) != 3) {
    throw ShapeError("encode_track: positions must be (t, 3), got " + format_shape(positions.shape()));
  }
  Graph<float> g(params);
  const Var v = encode_track(g, positions.data(), true_length, cls, origin, config);
  return g.value(v);
}

Vec3 encoding_origin(const SceneBatch & batch, std::size_t row, const EncoderConfig & config)
{
  if (config.frame == InputFrame::Ego) {
    return {};
  }
  const float * last = &batch.target_history[(row * batch.history + batch.history - 1) * 3];
  return {last[0], last[1], last[2]};
}

template <typename T>
RowEncoding<T> encode_row(Graph<T> & g, const SceneBatch & batch, std::size_t row, const EncoderConfig & config)
{
  const Vec3 origin = encoding_origin(batch, row, config);
  RowEncoding<T> out;
  const std::size_t th = batch.history;
  const auto target = batch.target_history.data().subspan(row * th * 3, th * 3);
  out.target = encode_track(g, target, th, batch.target_class[row], origin, config);
  const std::size_t tb = batch.max_history;
  for (std::size_t j = 0; j < batch.max_neighbors; ++j) {
    if (!batch.neighbor_valid(row, j)) {
      out.neighbors.push_back(Var{});
      continue;
    }
    const std::size_t slot = row * batch.max_neighbors + j;
    const auto track = batch.neighbor_history.data().subspan(slot * tb * 3, tb * 3);
    const auto len = static_cast<std::size_t>(batch.neighbor_length[slot]);
    out.neighbors.push_back(encode_track(g, track, len, batch.neighbor_class[slot], origin, config));
  }
  return out;
}

BatchEncoding encode_batch(const SceneBatch & batch, const ParamStore<float> & params, const EncoderConfig & config)
{
  const std::size_t E = config.encoding_size();
  BatchEncoding out;
  out.target = Tensor<float>(Shape{batch.size, E});
  out.neighbors = Tensor<float>(Shape{batch.size, batch.max_neighbors, E});
  out.valid.assign(batch.size * batch.max_neighbors, false);
  for (std::size_t i = 0; i < batch.size; ++i) {
    Graph<float> g(params);
    const auto row = encode_row(g, batch, i, config);
    const auto & t = g.value(row.target);
    std::copy(t.values().begin(), t.values().end(), &out.target[i * E]);
    for (std::size_t j = 0; j < batch.max_neighbors; ++j) {
      if (!row.neighbors[j].valid()) {
        continue;
      }
      const auto & n = g.value(row.neighbors[j]);
      std::copy(n.values().begin(), n.values().end(), &out.neighbors[(i * batch.max_neighbors + j) * E]);
      out.valid[i * batch.max_neighbors + j] = true;
    }
  }
  return out;
}

#define SOCIALMASK_INSTANTIATE_ENCODER(T)                                                                      \
  template Var encode_track<T>(Graph<T> &, std::span<const float>, std::size_t, AgentClass, const Vec3 &, \
                               const EncoderConfig &);                                                       \
  template RowEncoding<T> encode_row<T>(Graph<T> &, const SceneBatch &, std::size_t, const EncoderConfig &);

SOCIALMASK_INSTANTIATE_ENCODER(float)
SOCIALMASK_INSTANTIATE_ENCODER(double)

}  // namespace socialmask
