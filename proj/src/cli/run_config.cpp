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

#include "socialmask/cli/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace socialmask::cli
{

using nlohmann::json;

RunConfig::RunConfig()
{
  generator.n_frames = 40;
}

namespace
{

void reject_unknown(const json & j, const std::set<std::string> & known, const std::string & where)
{
  if (!j.is_object()) {
    throw UsageError("config: '" + where + "' must be an object");
  }
  for (const auto & [key, value] : j.items()) {
    if (known.count(key) == 0) {
      throw UsageError("config: unknown key '" + where + (where.empty() ? "" : ".") + key + "'");
    }
  }
}

template <typename T>
void read(const json & j, const char * key, T & out)
{
  if (j.contains(key)) {
    out = j.at(key).get<T>();
  }
}

template <typename T>
void read(const json & j, const char * key, std::optional<T> & out)
{
  if (j.contains(key)) {
    out = j.at(key).get<T>();
  }
}

template <typename E, typename Parse>
void read_enum(const json & j, const char * key, std::optional<E> & out, Parse parse)
{
  if (j.contains(key)) {
    const auto name = j.at(key).get<std::string>();
    const auto v = parse(name);
    if (!v) {
      throw UsageError("config: bad value '" + name + "' for '" + key + "'");
    }
    out = *v;
  }
}

std::optional<bool> parse_encoder(std::string_view name)
{
  if (name == "vlstm") {
    return true;
  }
  if (name == "lstm") {
    return false;
  }
  return std::nullopt;
}

void apply_json(RunConfig & c, const json & j)
{
  reject_unknown(j,
                 {"seed", "data", "checkpoint", "out", "plot", "plot_instances", "generator", "extraction", "model",
                  "training", "evaluation", "ablation"},
                 "");
  read(j, "seed", c.seed);
  read(j, "data", c.data);
  read(j, "checkpoint", c.checkpoint);
  read(j, "out", c.out);
  read(j, "plot", c.plot);
  read(j, "plot_instances", c.plot_instances);
  if (j.contains("generator")) {
    const json & g = j.at("generator");
    reject_unknown(g, {"scenes", "frames", "density", "interaction", "position_noise_m", "frame_period_s", "class_mix"},
                   "generator");
    read(g, "scenes", c.scenes);
    read(g, "frames", c.generator.n_frames);
    std::optional<Density> density;
    read_enum(g, "density", density, parse_density);
    if (density) {
      c.generator.density = *density;
    }
    read(g, "interaction", c.generator.interaction);
    read(g, "position_noise_m", c.generator.position_noise_m);
    read(g, "frame_period_s", c.generator.frame_period_s);
    if (g.contains("class_mix")) {
      const json & m = g.at("class_mix");
      reject_unknown(m, {"pedestrian", "vehicle", "rider"}, "generator.class_mix");
      read(m, "pedestrian", c.generator.class_mix.pedestrian);
      read(m, "vehicle", c.generator.class_mix.vehicle);
      read(m, "rider", c.generator.class_mix.rider);
    }
  }
  if (j.contains("extraction")) {
    const json & e = j.at("extraction");
    reject_unknown(e, {"anchor_stride", "region_m", "cells", "train_fraction", "fit_fraction"}, "extraction");
    read(e, "anchor_stride", c.anchor_stride);
    read(e, "region_m", c.grid.region_m);
    read(e, "cells", c.grid.cells);
    read(e, "train_fraction", c.train_fraction);
    read(e, "fit_fraction", c.fit_fraction);
  }
  if (j.contains("model")) {
    const json & m = j.at("model");
    reject_unknown(m, {"head", "fusion", "encoder", "mask", "t_hist", "t_fut"}, "model");
    read_enum(m, "head", c.model.head, parse_head_kind);
    read_enum(m, "fusion", c.model.fusion, parse_fusion_kind);
    read_enum(m, "encoder", c.model.variable_length, parse_encoder);
    read_enum(m, "mask", c.model.mask, parse_mask_kind);
    read(m, "t_hist", c.model.t_hist);
    read(m, "t_fut", c.model.t_fut);
  }
  if (j.contains("training")) {
    const json & t = j.at("training");
    reject_unknown(t,
                   {"preset", "lr", "lr_decay", "decay_every", "batch_size", "max_epochs", "patience",
                    "min_improvement"},
                   "training");
    read(t, "preset", c.training.preset);
    read(t, "lr", c.training.lr);
    read(t, "lr_decay", c.training.lr_decay);
    read(t, "decay_every", c.training.decay_every);
    read(t, "batch_size", c.training.batch_size);
    read(t, "max_epochs", c.training.max_epochs);
    read(t, "patience", c.training.patience);
    read(t, "min_improvement", c.training.min_improvement);
  }
  if (j.contains("evaluation")) {
    const json & e = j.at("evaluation");
    reject_unknown(e, {"split", "throughput_calls"}, "evaluation");
    read(e, "split", c.eval_split);
    read(e, "throughput_calls", c.throughput_calls);
  }
  if (j.contains("ablation")) {
    const json & a = j.at("ablation");
    reject_unknown(a, {"instances"}, "ablation");
    read(a, "instances", c.ablation_instances);
  }
}

}  // namespace

void apply_config_json(RunConfig & config, const std::string & text)
{
  try {
    apply_json(config, json::parse(text));
  } catch (const json::exception & e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (config.eval_split != "test" && config.eval_split != "all") {
    throw UsageError("config: evaluation.split must be 'test' or 'all'");
  }
}

void apply_config_file(RunConfig & config, const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot read config file '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  apply_config_json(config, text.str());
}

ModelConfig resolve_model(const RunConfig & config, const ModelConfig * base)
{
  ModelConfig m = base != nullptr ? *base : ModelConfig::make(5, 5, config.grid);
  const ModelChoice & c = config.model;
  m.history = c.t_hist.value_or(m.history);
  m.horizon = c.t_fut.value_or(m.horizon);
  m.encoder.fixed_steps = m.history;
  m.decoder.head = c.head.value_or(m.decoder.head);
  m.fusion.kind = c.fusion.value_or(m.fusion.kind);
  m.fusion.mask = c.mask.value_or(m.fusion.mask);
  m.encoder.variable_length = c.variable_length.value_or(m.encoder.variable_length);
  try {
    m.validate();
  } catch (const std::invalid_argument & e) {
    throw UsageError(e.what());
  }
  return m;
}

TrainConfig resolve_training(const RunConfig & config, const ModelConfig & model, const std::string & default_preset)
{
  const TrainingChoice & t = config.training;
  const std::string preset = t.preset.value_or(default_preset);
  TrainConfig c;
  if (preset == "desk") {
    c = desk_train_config(model, config.seed);
  } else if (preset == "paper") {
    c.model = model;
    c.seed = config.seed;
  } else {
    throw UsageError("unknown training preset '" + preset + "' (expected paper or desk)");
  }
  c.lr = t.lr.value_or(c.lr);
  c.lr_decay = t.lr_decay.value_or(c.lr_decay);
  c.decay_every = t.decay_every.value_or(c.decay_every);
  c.batch_size = t.batch_size.value_or(c.batch_size);
  c.max_epochs = t.max_epochs.value_or(c.max_epochs);
  c.patience = t.patience.value_or(c.patience);
  c.min_improvement = t.min_improvement.value_or(c.min_improvement);
  try {
    c.validate();
  } catch (const std::invalid_argument & e) {
    throw UsageError(e.what());
  }
  return c;
}

ExtractionConfig resolve_extraction(const RunConfig & config, const ModelConfig & model)
{
  ExtractionConfig e;
  e.history = model.history;
  e.horizon = model.horizon;
  e.grid = model.grid;
  e.anchor_stride = config.anchor_stride;
  if (e.anchor_stride == 0) {
    throw UsageError("extraction.anchor_stride must be positive");
  }
  return e;
}

CorpusSpec resolve_corpus(const RunConfig & config, const ModelConfig & model)
{
  CorpusSpec s;
  s.scene = config.generator;
  s.target_instances = config.ablation_instances;
  s.count_horizon = model.horizon;
  s.history = model.history;
  s.anchor_stride = config.anchor_stride;
  s.grid = model.grid;
  s.train_fraction = config.train_fraction;
  s.fit_fraction = config.fit_fraction;
  return s;
}

std::string echo_config_json(const RunConfig & c, const ModelConfig & model, const TrainConfig * training,
                             const std::string & preset)
{
  json j = {
    {"seed", c.seed},
    {"data", c.data},
    {"checkpoint", c.checkpoint},
    {"out", c.out},
    {"plot", c.plot},
    {"plot_instances", c.plot_instances},
    {"generator",
     {{"scenes", c.scenes},
      {"frames", c.generator.n_frames},
      {"density", std::string(to_string(c.generator.density))},
      {"interaction", c.generator.interaction},
      {"position_noise_m", c.generator.position_noise_m},
      {"frame_period_s", c.generator.frame_period_s},
      {"class_mix",
       {{"pedestrian", c.generator.class_mix.pedestrian},
        {"vehicle", c.generator.class_mix.vehicle},
        {"rider", c.generator.class_mix.rider}}}}},
    {"extraction",
     {{"anchor_stride", c.anchor_stride},
      {"region_m", model.grid.region_m},
      {"cells", model.grid.cells},
      {"train_fraction", c.train_fraction},
      {"fit_fraction", c.fit_fraction}}},
    {"model",
     {{"head", std::string(to_string(model.decoder.head))},
      {"fusion", std::string(to_string(model.fusion.kind))},
      {"encoder", model.encoder.variable_length ? "vlstm" : "lstm"},
      {"mask", std::string(to_string(model.fusion.mask))},
      {"t_hist", model.history},
      {"t_fut", model.horizon}}},
    {"evaluation", {{"split", c.eval_split}, {"throughput_calls", c.throughput_calls}}},
    {"ablation", {{"instances", c.ablation_instances}}},
  };
  if (training != nullptr) {
    j["training"] = {
      {"preset", c.training.preset.value_or(preset)},
      {"lr", training->lr},
      {"lr_decay", training->lr_decay},
      {"decay_every", training->decay_every},
      {"batch_size", training->batch_size},
      {"max_epochs", training->max_epochs},
      {"patience", training->patience},
      {"min_improvement", training->min_improvement},
    };
  }
  return j.dump(2) + "\n";
}

}  // namespace socialmask::cli
