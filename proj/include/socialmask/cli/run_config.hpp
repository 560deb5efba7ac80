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

#ifndef SOCIALMASK__CLI__RUN_CONFIG_HPP_
#define SOCIALMASK__CLI__RUN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "socialmask/model/model.hpp"
#include "socialmask/scene/instances.hpp"
#include "socialmask/scene/synthetic.hpp"
#include "socialmask/train/ablation.hpp"
#include "socialmask/train/trainer.hpp"

namespace socialmask::cli
{

/// Bad flags, config keys or missing inputs; the process exits with 2.
class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Model choices; unset fields fall back to the checkpoint's configuration
/// (eval, predict) or to the defaults (train, ablate).
struct ModelChoice
{
  std::optional<HeadKind> head;
  std::optional<FusionKind> fusion;
  std::optional<bool> variable_length;
  std::optional<MaskKind> mask;
  std::optional<std::size_t> t_hist;
  std::optional<std::size_t> t_fut;
};

/// Training hyper-parameters. Unset fields come from the preset: "paper"
/// for train, "desk" for ablate (see desk_train_config).
struct TrainingChoice
{
  std::optional<std::string> preset;
  std::optional<double> lr;
  std::optional<double> lr_decay;
  std::optional<std::size_t> decay_every;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> max_epochs;
  std::optional<std::size_t> patience;
  std::optional<double> min_improvement;
};

struct RunConfig
{
  std::uint64_t seed = 1;
  /// Scene file (JSON lines) read by train, eval, predict.
  std::string data;
  /// Checkpoint read by eval and predict; empty means <out>/checkpoint.bin.
  std::string checkpoint;
  std::string out = "out";
  bool plot = false;
  std::size_t plot_instances = 6;

  /// gen: scene count and generator settings. The generator seed is the
  /// run seed.
  std::size_t scenes = 10;
  SyntheticConfig generator;

  /// Instance extraction and the scene split.
  std::size_t anchor_stride = 3;
  GridSpec grid;
  double train_fraction = 0.8;
  double fit_fraction = 0.875;
  /// eval and predict: "test" (the split train held out) or "all".
  std::string eval_split = "test";

  ModelChoice model;
  TrainingChoice training;
  std::size_t throughput_calls = 1000;
  /// ablate: instances per corpus.
  std::size_t ablation_instances = 2000;

  RunConfig();
};

/// Applies the keys present in `text` (a JSON object) on top of `config`.
/// Unknown keys and bad values throw UsageError.
void apply_config_json(RunConfig & config, const std::string & text);

/// Reads a JSON config file and applies it.
void apply_config_file(RunConfig & config, const std::string & path);

/// Model configuration: `base` (or the defaults) with the explicit choices
/// applied. Throws UsageError when the result is inconsistent.
ModelConfig resolve_model(const RunConfig & config, const ModelConfig * base = nullptr);

/// Training configuration for `model`, starting from `default_preset`
/// unless a preset is chosen explicitly.
TrainConfig resolve_training(const RunConfig & config, const ModelConfig & model, const std::string & default_preset);

/// Extraction settings for `model`'s history and horizon.
ExtractionConfig resolve_extraction(const RunConfig & config, const ModelConfig & model);

/// Ablation corpus settings.
CorpusSpec resolve_corpus(const RunConfig & config, const ModelConfig & model);

/**
 * Fully resolved configuration as JSON, with every optional filled from the
 * model and training settings actually used (`preset` names the preset the
 * training settings started from). Applying it to a default RunConfig
 * reproduces the run.
 */
std::string echo_config_json(const RunConfig & config, const ModelConfig & model, const TrainConfig * training,
                             const std::string & preset = "paper");

}  // namespace socialmask::cli

#endif  // SOCIALMASK__CLI__RUN_CONFIG_HPP_
