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
#ifndef SOCIALMASK__MODEL__ENCODER_HPP_
#define SOCIALMASK__MODEL__ENCODER_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "socialmask/core/graph.hpp"
#include "socialmask/core/param_store.hpp"
#include "socialmask/core/rng.hpp"
#include "socialmask/core/tensor.hpp"
#include "socialmask/scene/batch.hpp"
#include "socialmask/scene/types.hpp"

namespace socialmask
{

/// Coordinates the encoder and decoder see.
enum class InputFrame {
  Ego,             ///< ego-relative positions as recorded
  TargetRelative,  ///< minus the target's anchor position
};

struct EncoderConfig
{
  std::size_t hidden = 17;
  /// Positions are divided by this (meters) before entering the LSTM.
  /// Target-relative motion over a few frames is meters, not tens of meters.
  double input_scale = 1.0;
  InputFrame frame = InputFrame::TargetRelative;
  /// False runs exactly `fixed_steps` steps over the zero-padded history
  /// instead of stopping at the true length.
  bool variable_length = true;
  std::size_t fixed_steps = 5;

  std::size_t encoding_size() const { return hidden + kAgentClassCount; }
};

/// Registers "encoder.lstm.{input_weight,recurrent_weight,bias}".
void init_encoder_params(ParamStore<float> & params, const EncoderConfig & config, Rng & rng);

/**
 * Encodes one track: the LSTM runs over its first `true_length` samples
 * (rows of `positions`, 3 floats each) from a zero state, and the final
 * hidden state is concatenated with the class one-hot. `origin` is
 * subtracted from every sample before scaling. Samples past `true_length`
 * are never read in variable-length mode.
 */
template <typename T>
Var encode_track(
  Graph<T> & g, std::span<const float> positions, std::size_t true_length, AgentClass cls, const Vec3 & origin,
  const EncoderConfig & config);

/// Value-level wrapper around the graph version; returns a length-20 vector.
Tensor<float> encode_track(
  const Tensor<float> & positions, std::size_t true_length, AgentClass cls, const ParamStore<float> & params,
  const EncoderConfig & config, const Vec3 & origin = {});

/// Origin used for batch row `row` under `config.frame`.
Vec3 encoding_origin(const SceneBatch & batch, std::size_t row, const EncoderConfig & config);

struct BatchEncoding
{
  Tensor<float> target;     // (b, 20)
  Tensor<float> neighbors;  // (b, n_b, 20), zero where invalid
  std::vector<bool> valid;  // b * n_b
};

/// Encodes every target and valid neighbor with the single shared LSTM.
BatchEncoding encode_batch(const SceneBatch & batch, const ParamStore<float> & params, const EncoderConfig & config);

/// Graph encodings of one batch row: the target and each valid neighbor
/// slot (invalid slots get an invalid Var).
template <typename T>
struct RowEncoding
{
  Var target;
  std::vector<Var> neighbors;
};

template <typename T>
RowEncoding<T> encode_row(Graph<T> & g, const SceneBatch & batch, std::size_t row, const EncoderConfig & config);

}  // namespace socialmask

#endif  // SOCIALMASK__MODEL__ENCODER_HPP_
