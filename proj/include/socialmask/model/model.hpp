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

#ifndef SOCIALMASK__MODEL__MODEL_HPP_
#define SOCIALMASK__MODEL__MODEL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socialmask/core/graph.hpp"
#include "socialmask/core/param_store.hpp"
#include "socialmask/model/decoder.hpp"
#include "socialmask/model/encoder.hpp"
#include "socialmask/model/fusion.hpp"
#include "socialmask/scene/batch.hpp"
#include "socialmask/scene/grid.hpp"

namespace socialmask
{

struct ModelConfig
{
  std::size_t history = 5;  // t_h
  std::size_t horizon = 5;  // t_f
  GridSpec grid;
  EncoderConfig encoder;
  FusionConfig fusion;
  DecoderConfig decoder;

  /// Default model for the given geometry, with every dependent size
  /// (grid k, encoder steps, decoder width) derived consistently.
  static ModelConfig make(std::size_t history, std::size_t horizon, GridSpec grid = {});

  /// Throws std::invalid_argument when sizes disagree between modules.
  void validate() const;
};

std::string model_config_to_json(const ModelConfig & config);
/// Throws std::invalid_argument on unknown enum names or missing fields.
ModelConfig model_config_from_json(const std::string & text);

/// Parameters for `config`, weights U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
/// biases zero, drawn from `seed`.
ParamStore<float> init_model_params(const ModelConfig & config, std::uint64_t seed);

/// Throws std::invalid_argument naming the first parameter that is missing,
/// unexpected or of the wrong shape for `config`.
void check_params_compatible(const ParamStore<float> & params, const ModelConfig & config);

template <typename T>
struct RowForward
{
  Vec3 origin;  // working-frame origin (zero in the ego frame)
  RowEncoding<T> encoding;
  SocialResult social;
  Var fused;
  DecodeOutput decoded;  // in the working frame
};

/// Builds the full forward graph of batch row `row`. With `teacher_forcing`
/// the decoder is fed ground-truth positions.
template <typename T>
RowForward<T> forward_row(
  Graph<T> & g, const SceneBatch & batch, std::size_t row, const ModelConfig & config, bool teacher_forcing);

/// Training loss of a forwarded row: L2 or Gaussian NLL against its ground
/// truth.
template <typename T>
Var row_loss(Graph<T> & g, const RowForward<T> & fwd, const SceneBatch & batch, std::size_t row,
             const ModelConfig & config);

/// Ground truth of row `row` as points.
std::vector<Vec3> row_ground_truth(const SceneBatch & batch, std::size_t row);

struct Prediction
{
  std::string instance_id;
  AgentClass agent_class = AgentClass::Vehicle;
  Tensor<float> points;                // (t_f, 3), ego frame
  std::optional<Tensor<float>> gauss;  // (t_f, 6): mu_x, mu_y, sigma_x, sigma_y, rho, z
};

/// Autoregressive prediction for one row.
Prediction predict_row(const ParamStore<float> & params, const SceneBatch & batch, std::size_t row,
                       const ModelConfig & config);

std::vector<Prediction> predict(const ParamStore<float> & params, const SceneBatch & batch,
                                const ModelConfig & config);

}  // namespace socialmask

#endif  // SOCIALMASK__MODEL__MODEL_HPP_
