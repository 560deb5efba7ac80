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

#include "socialmask/train/ablation.hpp"

#include <sstream>
#include <stdexcept>

#include "socialmask/train/evaluate.hpp"

namespace socialmask
{

ExperimentData make_experiment_data(const CorpusSpec & spec, std::uint64_t seed, std::size_t horizon)
{
  validate(spec.scene);
  if (spec.target_instances == 0) {
    throw std::invalid_argument("make_experiment_data: target_instances must be positive");
  }
  ExtractionConfig count;
  count.history = spec.history;
  count.horizon = spec.count_horizon;
  count.grid = spec.grid;
  count.anchor_stride = spec.anchor_stride;
  ExtractionConfig extract = count;
  extract.horizon = horizon;

  std::vector<Scene> scenes;
  std::size_t total = 0;
  Rng rng(seed);
  // A scene too short for any instance would loop forever.
  constexpr std::size_t kMaxScenes = 100000;
  while (total < spec.target_instances) {
    if (scenes.size() == kMaxScenes) {
      throw std::invalid_argument("make_experiment_data: scenes yield no instances");
    }
    SyntheticConfig c = spec.scene;
    c.seed = rng.next_u64();
    c.scene_id = "s" + std::to_string(scenes.size());
    scenes.push_back(generate_synthetic_scene(c));
    total += extract_instances(scenes.back(), count).instances.size();
  }
  auto [fit_and_val, test] = split_scenes(scenes, spec.train_fraction, seed);
  auto [fit, val] = split_scenes(fit_and_val, spec.fit_fraction, seed + 1);
  ExperimentData data;
  data.scenes = scenes.size();
  data.train = extract_instances(fit, extract).instances;
  data.val = extract_instances(val, extract).instances;
  data.test = extract_instances(test, extract).instances;
  return data;
}

TrainConfig desk_train_config(const ModelConfig & model, std::uint64_t seed)
{
  TrainConfig c;
  c.model = model;
  c.lr = 3e-3;
  c.lr_decay = 0.1;
  c.decay_every = 40;
  c.batch_size = 8;
  c.max_epochs = 100;
  c.patience = 100;
  c.seed = seed;
  return c;
}

std::vector<AblationRow> fusion_ablation_rows(const ModelConfig & base)
{
  auto variant = [&](FusionKind kind, MaskKind mask, bool variable_length) {
    ModelConfig c = base;
    c.fusion.kind = kind;
    c.fusion.mask = mask;
    c.encoder.variable_length = variable_length;
    c.encoder.fixed_steps = c.history;
    c.validate();
    return c;
  };
  return {
    {"VLSTM + CON", variant(FusionKind::Con, MaskKind::Uniform, true)},
    {"VLSTM + SP", variant(FusionKind::Sp, MaskKind::Uniform, true)},
    {"VLSTM + SCNN", variant(FusionKind::Scnn, MaskKind::Uniform, true)},
    {"LSTM+Attention+SCNN", variant(FusionKind::Scnn, MaskKind::Attention, false)},
    {"VLSTM+Attention+SCNN", variant(FusionKind::Scnn, MaskKind::Attention, true)},
  };
}

std::string horizon_label(std::size_t horizon)
{
  return std::to_string(horizon) + " frame";
}

ExperimentResult run_experiment(const TrainConfig & config, const ExperimentData & data, std::size_t throughput_calls)
{
  if (data.test.empty()) {
    throw std::invalid_argument("run_experiment: no test instances");
  }
  const TrainResult trained = train(config, data.train, data.val);
  ExperimentResult r;
  r.seed = config.seed;
  r.horizon = config.model.horizon;
  r.test = evaluate_model(trained.params, config.model, data.test, throughput_calls);
  r.best_epoch = trained.best_epoch;
  r.epochs_run = trained.log.size();
  return r;
}

std::vector<ExperimentResult> run_ablation(
  const ModelConfig & base, const CorpusSpec & spec, std::uint64_t seed,
  const std::function<void(TrainConfig &)> & adjust, const ProgressCallback & progress)
{
  auto configure = [&](const ModelConfig & model) {
    TrainConfig c = desk_train_config(model, seed);
    if (adjust) {
      adjust(c);
    }
    return c;
  };
  auto report = [&](ExperimentResult r, std::vector<ExperimentResult> & out) {
    if (progress) {
      progress(r);
    }
    out.push_back(std::move(r));
  };

  std::vector<ExperimentResult> out;
  const ExperimentData base_data = make_experiment_data(spec, seed, base.horizon);
  for (const auto & row : fusion_ablation_rows(base)) {
    ExperimentResult r = run_experiment(configure(row.model), base_data);
    r.group = "ablation";
    r.label = row.label;
    report(std::move(r), out);
  }
  // The last row is the full model.
  const ExperimentResult full_row = out.back();
  for (const std::size_t h : kSweepHorizons) {
    ExperimentResult r;
    if (h == base.horizon) {
      r = full_row;
    } else {
      ModelConfig model = base;
      model.horizon = h;
      model.validate();
      r = run_experiment(configure(model), make_experiment_data(spec, seed, h));
    }
    r.group = "horizon";
    r.label = horizon_label(h);
    report(std::move(r), out);
  }
  return out;
}

std::string ablation_csv(const std::vector<ExperimentResult> & results)
{
  std::ostringstream out;
  out.precision(9);
  out << "group,label,seed,t_f,instances,ADE,MDE,FDE,best_epoch,epochs\n";
  for (const auto & r : results) {
    out << r.group << ',' << r.label << ',' << r.seed << ',' << r.horizon << ',' << r.test.all.count << ','
        << r.test.all.ade << ',' << r.test.all.mde << ',' << r.test.all.fde << ',' << r.best_epoch << ','
        << r.epochs_run << '\n';
  }
  return out.str();
}

}  // namespace socialmask
