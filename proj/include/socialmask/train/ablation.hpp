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

#ifndef SOCIALMASK__TRAIN__ABLATION_HPP_
#define SOCIALMASK__TRAIN__ABLATION_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "socialmask/scene/instances.hpp"
#include "socialmask/scene/synthetic.hpp"
#include "socialmask/train/metrics.hpp"
#include "socialmask/train/trainer.hpp"

namespace socialmask
{

/// Synthetic corpus and split shared by every row of an experiment.
struct CorpusSpec
{
  SyntheticConfig scene;
  /// Scenes are generated until extraction at `count_horizon` yields at
  /// least this many instances. Counting at a fixed horizon keeps the scene
  /// set identical across a horizon sweep.
  std::size_t target_instances = 2000;
  std::size_t count_horizon = 5;
  std::size_t history = 5;
  std::size_t anchor_stride = 3;
  GridSpec grid;
  /// Fraction of scenes used for training plus validation.
  double train_fraction = 0.8;
  /// Fraction of the training scenes kept for training; the rest validate.
  double fit_fraction = 0.875;
};

struct ExperimentData
{
  std::vector<PredictionInstance> train;
  std::vector<PredictionInstance> val;
  std::vector<PredictionInstance> test;
  std::size_t scenes = 0;
};

/// Scenes seeded from `seed`, split by scene, extracted with `horizon`.
ExperimentData make_experiment_data(const CorpusSpec & spec, std::uint64_t seed, std::size_t horizon);

/**
 * Training settings for small synthetic corpora: a few thousand instances
 * give too few steps per epoch for the default schedule, so batches are
 * smaller, the step size larger and the decay later.
 */
TrainConfig desk_train_config(const ModelConfig & model, std::uint64_t seed);

struct AblationRow
{
  std::string label;
  ModelConfig model;
};

/// The five fusion and encoder variants, labeled as in the paper's table.
/// All share `base`'s geometry and head.
std::vector<AblationRow> fusion_ablation_rows(const ModelConfig & base);

/// Horizons of the sweep.
inline constexpr std::size_t kSweepHorizons[] = {5, 7, 9};

/// Label of one horizon row, e.g. "5 frame".
std::string horizon_label(std::size_t horizon);

struct ExperimentResult
{
  std::string group;  // "ablation" or "horizon"
  std::string label;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  MetricsReport test;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
};

/// Trains on data.train (validating on data.val) and evaluates on data.test.
ExperimentResult run_experiment(
  const TrainConfig & config, const ExperimentData & data, std::size_t throughput_calls = 0);

using ProgressCallback = std::function<void(const ExperimentResult &)>;

/**
 * Runs the five ablation rows and the horizon sweep for one seed. The
 * horizon rows use the full model; the full ablation row doubles as the
 * 5-frame row when `base` has horizon 5. `adjust` may alter each row's
 * training settings (for example the epoch budget).
 */
std::vector<ExperimentResult> run_ablation(
  const ModelConfig & base, const CorpusSpec & spec, std::uint64_t seed,
  const std::function<void(TrainConfig &)> & adjust = {}, const ProgressCallback & progress = {});

/// CSV with header group,label,seed,t_f,instances,ADE,MDE,FDE,best_epoch,epochs.
std::string ablation_csv(const std::vector<ExperimentResult> & results);

}  // namespace socialmask

#endif  // SOCIALMASK__TRAIN__ABLATION_HPP_
