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

#ifndef SOCIALMASK__TRAIN__TRAINER_HPP_
#define SOCIALMASK__TRAIN__TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "socialmask/core/adam.hpp"
#include "socialmask/core/param_store.hpp"
#include "socialmask/model/model.hpp"
#include "socialmask/scene/instances.hpp"

namespace socialmask
{

struct TrainConfig
{
  ModelConfig model;
  double lr = 1e-3;
  /// Staircase schedule: lr * lr_decay^(epoch / decay_every).
  double lr_decay = 0.1;
  std::size_t decay_every = 10;
  std::size_t batch_size = 256;
  std::size_t max_epochs = 50;
  /// Early stopping: stop after `patience` epochs without a validation ADE
  /// improvement of at least `min_improvement` meters.
  std::size_t patience = 15;
  double min_improvement = 1e-3;
  /// Feed ground-truth positions to the decoder during training. False
  /// trains on the decoder's own predictions, as at inference.
  bool teacher_forcing = true;
  std::uint64_t seed = 1;
  AdamConfig adam;

  void validate() const;
};

/// Learning rate used during `epoch` (0-based).
double learning_rate(const TrainConfig & config, std::size_t epoch);

struct EpochLog
{
  std::size_t epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_ade = 0.0;
};

/// Thrown when a batch loss is not finite.
class DivergenceError : public std::runtime_error
{
public:
  DivergenceError(std::size_t epoch, std::size_t batch, double loss);
  std::size_t epoch;
  std::size_t batch;
};

struct TrainResult
{
  /// Parameters of the epoch with the best validation ADE (or the last
  /// epoch when there is no validation data).
  ParamStore<float> params;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  double best_val_ade = 0.0;
  bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochLog &)>;

/**
 * Adam over shuffled mini-batches with teacher forcing. The batch loss is
 * the mean of per-instance losses. Deterministic in (config, data).
 * Validation loss uses teacher forcing; validation ADE uses autoregressive
 * prediction.
 */
TrainResult train(
  const TrainConfig & config, std::span<const PredictionInstance> train_set,
  std::span<const PredictionInstance> val_set, const EpochCallback & on_epoch = {});

/// Mean loss over `instances`, teacher-forced unless told otherwise.
double mean_loss(const ParamStore<float> & params, const ModelConfig & config,
                 std::span<const PredictionInstance> instances, std::size_t batch_size = 256,
                 bool teacher_forcing = true);

/// CSV with header epoch,lr,train_loss,val_loss,val_ade.
std::string learning_curve_csv(const std::vector<EpochLog> & log);

/// Scenes split by a seeded shuffle: the first round(fraction * n) go to
/// the first list.
std::pair<std::vector<Scene>, std::vector<Scene>> split_scenes(
  const std::vector<Scene> & scenes, double fraction, std::uint64_t seed);

}  // namespace socialmask

#endif  // SOCIALMASK__TRAIN__TRAINER_HPP_
