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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "socialmask/cli/commands.hpp"

namespace
{

using namespace socialmask;
using namespace socialmask::cli;

/// Flag values; unset flags leave the config file or defaults alone.
struct Flags
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> head;
  std::optional<std::string> fusion;
  std::optional<std::string> encoder;
  bool uniform_mask = false;
  std::optional<std::size_t> t_hist;
  std::optional<std::size_t> t_fut;
  std::optional<std::string> out;
  bool plot = false;
  std::optional<std::string> data;
  std::optional<std::string> checkpoint;
  std::optional<std::size_t> scenes;
  std::optional<std::size_t> frames;
  std::optional<std::string> density;
  bool no_interaction = false;
  std::optional<std::string> preset;
  std::optional<std::size_t> epochs;
  std::optional<std::string> split;
  std::optional<std::size_t> throughput_calls;
  std::optional<std::size_t> instances;
};

void add_common(CLI::App & cmd, Flags & f)
{
  cmd.add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd.add_option("--seed", f.seed, "seed for data generation, splits and initialization");
  cmd.add_option("--out", f.out, "output directory");
}

void add_model(CLI::App & cmd, Flags & f)
{
  cmd.add_option("--head", f.head, "decoder head")->check(CLI::IsMember({"l2", "gauss"}));
  cmd.add_option("--fusion", f.fusion, "social fusion")->check(CLI::IsMember({"scnn", "sp", "con"}));
  cmd.add_option("--encoder", f.encoder, "variable- or fixed-length history encoder")
    ->check(CLI::IsMember({"vlstm", "lstm"}));
  cmd.add_flag("--uniform-mask", f.uniform_mask, "replace the attention mask with 1/k^2");
  cmd.add_option("--t-hist", f.t_hist, "history frames")->check(CLI::PositiveNumber);
  cmd.add_option("--t-fut", f.t_fut, "predicted frames")->check(CLI::PositiveNumber);
}

void add_data(CLI::App & cmd, Flags & f)
{
  cmd.add_option("--data", f.data, "scene file (JSON lines)");
}

void add_checkpoint(CLI::App & cmd, Flags & f)
{
  cmd.add_option("--checkpoint", f.checkpoint, "checkpoint (default <out>/checkpoint.bin)");
  cmd.add_option("--split", f.split, "instances to use")->check(CLI::IsMember({"test", "all"}));
}

void add_training(CLI::App & cmd, Flags & f)
{
  cmd.add_option("--preset", f.preset, "training preset")->check(CLI::IsMember({"paper", "desk"}));
  cmd.add_option("--epochs", f.epochs, "maximum epochs")->check(CLI::PositiveNumber);
}

void add_generator(CLI::App & cmd, Flags & f)
{
  cmd.add_option("--scenes", f.scenes, "number of scenes")->check(CLI::PositiveNumber);
  cmd.add_option("--frames", f.frames, "frames per scene")->check(CLI::PositiveNumber);
  cmd.add_option("--density", f.density, "traffic density")->check(CLI::IsMember({"low", "high"}));
  cmd.add_flag("--no-interaction", f.no_interaction, "agents ignore each other");
}

RunConfig resolve(const Flags & f)
{
  RunConfig c;
  if (!f.config.empty()) {
    apply_config_file(c, f.config);
  }
  c.seed = f.seed.value_or(c.seed);
  c.out = f.out.value_or(c.out);
  c.data = f.data.value_or(c.data);
  c.checkpoint = f.checkpoint.value_or(c.checkpoint);
  c.plot = c.plot || f.plot;
  if (f.head) {
    c.model.head = parse_head_kind(*f.head);
  }
  if (f.fusion) {
    c.model.fusion = parse_fusion_kind(*f.fusion);
  }
  if (f.encoder) {
    c.model.variable_length = *f.encoder == "vlstm";
  }
  if (f.uniform_mask) {
    c.model.mask = MaskKind::Uniform;
  }
  if (f.t_hist) {
    c.model.t_hist = f.t_hist;
  }
  if (f.t_fut) {
    c.model.t_fut = f.t_fut;
  }
  c.scenes = f.scenes.value_or(c.scenes);
  c.generator.n_frames = f.frames.value_or(c.generator.n_frames);
  if (f.density) {
    c.generator.density = *parse_density(*f.density);
  }
  if (f.no_interaction) {
    c.generator.interaction = false;
  }
  if (f.preset) {
    c.training.preset = f.preset;
  }
  if (f.epochs) {
    c.training.max_epochs = f.epochs;
  }
  c.eval_split = f.split.value_or(c.eval_split);
  c.throughput_calls = f.throughput_calls.value_or(c.throughput_calls);
  c.ablation_instances = f.instances.value_or(c.ablation_instances);
  return c;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Trajectory prediction with attention-masked social convolution"};
  app.require_subcommand(1);
  Flags f;

  CLI::App * gen = app.add_subcommand("gen", "generate synthetic scenes");
  add_common(*gen, f);
  add_generator(*gen, f);

  CLI::App * train = app.add_subcommand("train", "train a model on a scene file");
  add_common(*train, f);
  add_model(*train, f);
  add_data(*train, f);
  add_training(*train, f);

  CLI::App * eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(*eval, f);
  add_model(*eval, f);
  add_data(*eval, f);
  add_checkpoint(*eval, f);
  eval->add_flag("--plot", f.plot, "write trajectory overlays and attention heat maps");
  eval->add_option("--throughput-calls", f.throughput_calls, "single-stream calls timed")
    ->check(CLI::PositiveNumber);

  CLI::App * predict = app.add_subcommand("predict", "export predictions as JSON lines");
  add_common(*predict, f);
  add_model(*predict, f);
  add_data(*predict, f);
  add_checkpoint(*predict, f);

  CLI::App * ablate = app.add_subcommand("ablate", "fusion ablation and horizon sweep");
  add_common(*ablate, f);
  add_model(*ablate, f);
  add_generator(*ablate, f);
  add_training(*ablate, f);
  ablate->add_option("--instances", f.instances, "instances per corpus")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const RunConfig config = resolve(f);
    if (gen->parsed()) {
      return cmd_gen(config, std::cout);
    }
    if (train->parsed()) {
      return cmd_train(config, std::cout);
    }
    if (eval->parsed()) {
      return cmd_eval(config, std::cout);
    }
    if (predict->parsed()) {
      return cmd_predict(config, std::cout);
    }
    return cmd_ablate(config, std::cout);
  } catch (const UsageError & e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
