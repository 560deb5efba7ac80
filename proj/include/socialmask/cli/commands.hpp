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

#ifndef SOCIALMASK__CLI__COMMANDS_HPP_
#define SOCIALMASK__CLI__COMMANDS_HPP_

#include <optional>
#include <ostream>
#include <string>

#include "socialmask/cli/run_config.hpp"
#include "socialmask/core/param_store.hpp"
#include "socialmask/scene/batch.hpp"

namespace socialmask::cli
{

// Every command writes its resolved configuration to <out>/<command>_config.json.

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Writes <out>/scenes.jsonl and prints agent counts per class and density.
int cmd_gen(const RunConfig & config, std::ostream & log);

/// Trains on the training scenes of --data and writes <out>/checkpoint.bin,
/// learning_curve.csv and the held-out metrics.
int cmd_train(const RunConfig & config, std::ostream & log);

/// Writes <out>/metrics.json (and plots under <out>/plots with --plot).
int cmd_eval(const RunConfig & config, std::ostream & log);

/// Writes <out>/predictions.jsonl, one JSON object per instance.
int cmd_predict(const RunConfig & config, std::ostream & log);

/// Runs the fusion ablation and the horizon sweep; writes <out>/ablation.csv.
int cmd_ablate(const RunConfig & config, std::ostream & log);

/// Attention mask of batch row `row`, or nullopt when `config` uses none.
std::optional<Tensor<float>> attention_mask_of(
  const ParamStore<float> & params, const SceneBatch & batch, std::size_t row, const ModelConfig & config);

/// Checkpoint metadata for a model trained with `seed`.
std::string checkpoint_metadata(const ModelConfig & model, std::uint64_t seed);

/// Model configuration stored in checkpoint metadata.
ModelConfig model_from_metadata(const std::string & metadata);

}  // namespace socialmask::cli

#endif  // SOCIALMASK__CLI__COMMANDS_HPP_
