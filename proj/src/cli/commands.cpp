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

#include "socialmask/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "socialmask/cli/plots.hpp"
#include "socialmask/core/checkpoint.hpp"
#include "socialmask/scene/scene_io.hpp"
#include "socialmask/train/evaluate.hpp"

namespace socialmask::cli
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

fs::path prepare_out(const RunConfig & config)
{
  const fs::path out(config.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw std::runtime_error("cannot create output directory '" + out.string() + "'");
  }
  return out;
}

void write_file(const fs::path & path, const std::string & text)
{
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
}

std::vector<Scene> load_scenes(const RunConfig & config)
{
  if (config.data.empty()) {
    throw UsageError("missing scene file: pass --data PATH");
  }
  if (!fs::is_regular_file(config.data)) {
    throw UsageError("scene file '" + config.data + "' does not exist");
  }
  return import_scenes(config.data);
}

struct Split
{
  std::vector<Scene> fit;
  std::vector<Scene> val;
  std::vector<Scene> test;
};

/// The scene split of make_experiment_data, applied to loaded scenes.
Split split(const RunConfig & config, const std::vector<Scene> & scenes)
{
  auto [fit_and_val, test] = split_scenes(scenes, config.train_fraction, config.seed);
  auto [fit, val] = split_scenes(fit_and_val, config.fit_fraction, config.seed + 1);
  return {std::move(fit), std::move(val), std::move(test)};
}

std::string format_metrics(const MetricsReport & r)
{
  std::ostringstream out;
  out.precision(4);
  out << std::fixed;
  auto row = [&](const std::string & name, const DisplacementMetrics & m) {
    out << "  " << name << ": ADE " << m.ade << "  MDE " << m.mde << "  FDE " << m.fde << "  (" << m.count
        << " instances)\n";
  };
  row("all", r.all);
  for (const auto cls : kAgentClasses) {
    const auto & m = r.per_class[class_index(cls)];
    if (m) {
      row(std::string(to_string(cls)), *m);
    } else {
      out << "  " << to_string(cls) << ": absent\n";
    }
  }
  return out.str();
}

/// Model of a checkpoint with the explicit choices of `config` applied,
/// verified against the stored parameters.
std::pair<Checkpoint, ModelConfig> load_model(const RunConfig & config)
{
  const fs::path path =
    config.checkpoint.empty() ? fs::path(config.out) / "checkpoint.bin" : fs::path(config.checkpoint);
  if (!fs::is_regular_file(path)) {
    throw UsageError("checkpoint '" + path.string() + "' does not exist");
  }
  Checkpoint ckpt = load_checkpoint(path);
  const ModelConfig stored = model_from_metadata(ckpt.metadata);
  const ModelConfig model = resolve_model(config, &stored);
  try {
    check_params_compatible(ckpt.params, model);
  } catch (const std::invalid_argument & e) {
    throw std::runtime_error(std::string("checkpoint and configuration disagree: ") + e.what());
  }
  return {std::move(ckpt), model};
}

std::vector<PredictionInstance> evaluation_instances(const RunConfig & config, const ModelConfig & model)
{
  const auto scenes = load_scenes(config);
  const ExtractionConfig ex = resolve_extraction(config, model);
  if (config.eval_split == "all") {
    return extract_instances(scenes, ex).instances;
  }
  return extract_instances(split(config, scenes).test, ex).instances;
}

}  // namespace

std::string checkpoint_metadata(const ModelConfig & model, std::uint64_t seed)
{
  return json{{"model", json::parse(model_config_to_json(model))}, {"seed", seed}}.dump();
}

ModelConfig model_from_metadata(const std::string & metadata)
{
  try {
    return model_config_from_json(json::parse(metadata).at("model").dump());
  } catch (const json::exception & e) {
    throw std::runtime_error(std::string("checkpoint metadata has no model configuration: ") + e.what());
  }
}

std::optional<Tensor<float>> attention_mask_of(
  const ParamStore<float> & params, const SceneBatch & batch, std::size_t row, const ModelConfig & config)
{
  Graph<float> g(params);
  const auto f = forward_row(g, batch, row, config, false);
  if (!f.social.mask.valid() || config.fusion.mask != MaskKind::Attention) {
    return std::nullopt;
  }
  return g.value(f.social.mask);
}

int cmd_gen(const RunConfig & config, std::ostream & log)
{
  SyntheticConfig sc = config.generator;
  sc.seed = config.seed;
  try {
    validate(sc);
  } catch (const std::invalid_argument & e) {
    throw UsageError(e.what());
  }
  if (config.scenes == 0) {
    throw UsageError("--scenes must be positive");
  }
  const fs::path out = prepare_out(config);
  const auto scenes = generate_synthetic_corpus(sc, config.scenes);
  export_scenes(out / "scenes.jsonl", scenes);
  write_file(out / "gen_config.json", echo_config_json(config, resolve_model(config), nullptr));

  std::array<std::set<std::pair<std::string, std::int64_t>>, kAgentClassCount> agents;
  std::size_t frames = 0;
  std::size_t observations = 0;
  for (const auto & s : scenes) {
    frames += s.frames.size();
    for (const auto & f : s.frames) {
      observations += f.agents.size();
      for (const auto & a : f.agents) {
        agents[class_index(a.agent_class)].insert({s.scene_id, a.id});
      }
    }
  }
  log << "wrote " << scenes.size() << " scenes (" << frames << " frames) to " << (out / "scenes.jsonl").string()
      << "\n";
  for (const auto cls : kAgentClasses) {
    log << "  " << to_string(cls) << ": " << agents[class_index(cls)].size() << " agents\n";
  }
  log << "  density " << to_string(sc.density) << ": "
      << static_cast<double>(observations) / static_cast<double>(std::max<std::size_t>(frames, 1))
      << " agents per frame\n";
  return kExitOk;
}

int cmd_train(const RunConfig & config, std::ostream & log)
{
  const ModelConfig model = resolve_model(config);
  const TrainConfig tc = resolve_training(config, model, "paper");
  const auto scenes = load_scenes(config);
  const fs::path out = prepare_out(config);
  write_file(out / "train_config.json", echo_config_json(config, model, &tc, "paper"));

  const Split parts = split(config, scenes);
  const ExtractionConfig ex = resolve_extraction(config, model);
  const auto fit = extract_instances(parts.fit, ex).instances;
  const auto val = extract_instances(parts.val, ex).instances;
  const auto test = extract_instances(parts.test, ex).instances;
  log << "instances: train " << fit.size() << ", validation " << val.size() << ", test " << test.size() << "\n";
  if (fit.empty()) {
    throw UsageError("no training instances: the scenes are too short for t_hist + t_fut");
  }

  TrainResult result;
  try {
    result = train(tc, fit, val, [&](const EpochLog & e) {
      log << "epoch " << e.epoch << "  lr " << e.lr << "  train " << e.train_loss << "  val " << e.val_loss
          << "  val ADE " << e.val_ade << "\n";
    });
  } catch (const DivergenceError & e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  save_checkpoint(out / "checkpoint.bin", Checkpoint{checkpoint_metadata(model, config.seed), result.params});
  write_file(out / "learning_curve.csv", learning_curve_csv(result.log));
  log << "best epoch " << result.best_epoch << ", checkpoint " << (out / "checkpoint.bin").string() << "\n";
  if (!test.empty()) {
    const auto report = evaluate_model(result.params, model, test, 0);
    write_file(out / "test_metrics.json", metrics_to_json(report) + "\n");
    log << "held-out test metrics:\n" << format_metrics(report);
  }
  return kExitOk;
}

int cmd_eval(const RunConfig & config, std::ostream & log)
{
  const auto [ckpt, model] = load_model(config);
  const auto instances = evaluation_instances(config, model);
  if (instances.empty()) {
    throw UsageError("no instances to evaluate in '" + config.data + "'");
  }
  const fs::path out = prepare_out(config);
  write_file(out / "eval_config.json", echo_config_json(config, model, nullptr));
  const auto report = evaluate_model(ckpt.params, model, instances, config.throughput_calls);
  write_file(out / "metrics.json", metrics_to_json(report) + "\n");
  write_file(out / "metrics_details.json", metrics_details_json(report) + "\n");
  log << "metrics on " << instances.size() << " instances:\n" << format_metrics(report);
  log << "throughput: " << report.throughput << " single-stream predictions/s over " << report.throughput_calls
      << " calls\n";

  if (config.plot) {
    const fs::path dir = out / "plots";
    fs::create_directories(dir);
    const std::size_t n = std::min(config.plot_instances, instances.size());
    const auto batch = build_batch(std::span(instances).first(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto pred = predict_row(ckpt.params, batch, i, model);
      const std::string stem = "instance_" + std::to_string(i);
      write_file(dir / (stem + ".csv"), trajectory_csv(instances[i], pred));
      write_file(dir / (stem + ".svg"), trajectory_svg(instances[i], pred));
      if (const auto mask = attention_mask_of(ckpt.params, batch, i, model)) {
        write_file(dir / ("mask_" + std::to_string(i) + ".csv"), mask_csv(*mask));
        write_file(dir / ("mask_" + std::to_string(i) + ".svg"), mask_svg(*mask));
      }
    }
    log << "plots for " << n << " instances in " << dir.string() << "\n";
  }
  return kExitOk;
}

int cmd_predict(const RunConfig & config, std::ostream & log)
{
  const auto [ckpt, model] = load_model(config);
  const auto instances = evaluation_instances(config, model);
  const fs::path out = prepare_out(config);
  write_file(out / "predict_config.json", echo_config_json(config, model, nullptr));
  const auto preds = predict_instances(ckpt.params, model, instances);
  std::ostringstream lines;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto & p = preds[i];
    json points = json::array();
    for (std::size_t s = 0; s < p.points.dim(0); ++s) {
      points.push_back({p.points[s * 3], p.points[s * 3 + 1], p.points[s * 3 + 2]});
    }
    json j = {{"instance_id", p.instance_id},
              {"scene_id", instances[i].scene_id},
              {"anchor_t", instances[i].anchor_t},
              {"agent_id", instances[i].target.agent_id},
              {"class", std::string(to_string(p.agent_class))},
              {"points", points}};
    if (p.gauss) {
      json g = json::array();
      for (std::size_t s = 0; s < p.gauss->dim(0); ++s) {
        json row = json::array();
        for (std::size_t k = 0; k < 6; ++k) {
          row.push_back((*p.gauss)[s * 6 + k]);
        }
        g.push_back(row);
      }
      j["gaussian"] = g;
    }
    lines << j.dump() << '\n';
  }
  write_file(out / "predictions.jsonl", lines.str());
  log << "wrote " << preds.size() << " predictions to " << (out / "predictions.jsonl").string() << "\n";
  return kExitOk;
}

int cmd_ablate(const RunConfig & config, std::ostream & log)
{
  const ModelConfig base = resolve_model(config);
  const TrainConfig tc = resolve_training(config, base, "desk");
  const fs::path out = prepare_out(config);
  write_file(out / "ablate_config.json", echo_config_json(config, base, &tc, "desk"));
  const auto adjust = [&](TrainConfig & c) {
    c.lr = tc.lr;
    c.lr_decay = tc.lr_decay;
    c.decay_every = tc.decay_every;
    c.batch_size = tc.batch_size;
    c.max_epochs = tc.max_epochs;
    c.patience = tc.patience;
    c.min_improvement = tc.min_improvement;
  };
  const auto results =
    run_ablation(base, resolve_corpus(config, base), config.seed, adjust, [&](const ExperimentResult & r) {
      log << r.group << "  " << r.label << "  t_f " << r.horizon << "  test ADE " << r.test.all.ade << "  MDE "
          << r.test.all.mde << "  FDE " << r.test.all.fde << "\n";
    });
  write_file(out / "ablation.csv", ablation_csv(results));
  log << "wrote " << (out / "ablation.csv").string() << "\n";
  return kExitOk;
}

}  // namespace socialmask::cli
