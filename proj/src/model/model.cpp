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

#include "socialmask/model/model.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "socialmask/core/rng.hpp"

namespace socialmask
{

using nlohmann::json;

ModelConfig ModelConfig::make(std::size_t history, std::size_t horizon, GridSpec grid)
{
  ModelConfig c;
  c.history = history;
  c.horizon = horizon;
  c.grid = grid;
  c.encoder.fixed_steps = history;
  c.fusion.k = grid.cells;
  c.fusion.channels = c.encoder.encoding_size();
  c.decoder.hidden = c.fusion.channels + c.fusion.embedding;
  return c;
}

void ModelConfig::validate() const
{
  auto fail = [](const std::string & what) { throw std::invalid_argument("model config: " + what); };
  if (history < 1 || horizon < 1) {
    fail("history and horizon must be positive");
  }
  if (!(grid.region_m > 0.0) || grid.cells < 1) {
    fail("grid needs a positive region and cell count");
  }
  if (encoder.hidden < 1 || !(encoder.input_scale > 0.0) || !(decoder.input_scale > 0.0)) {
    fail("encoder hidden size and input scales must be positive");
  }
  if (!encoder.variable_length && encoder.fixed_steps != history) {
    fail("fixed-length encoder steps must equal the history length");
  }
  if (fusion.k != grid.cells) {
    fail("fusion grid size " + std::to_string(fusion.k) + " differs from grid cells " + std::to_string(grid.cells));
  }
  if (fusion.channels != encoder.encoding_size()) {
    fail("fusion channels must equal the encoding size " + std::to_string(encoder.encoding_size()));
  }
  if (decoder.hidden != encoder.encoding_size() + fusion.embedding) {
    fail("decoder hidden size must equal encoding + social embedding (" +
         std::to_string(encoder.encoding_size() + fusion.embedding) + ")");
  }
  if (!(decoder.displacement_scale > 0.0) || !(decoder.lambda_z >= 0.0)) {
    fail("displacement scale must be positive and lambda_z non-negative");
  }
  if (fusion.kind == FusionKind::Con && fusion.con_slots < 1) {
    fail("concatenation fuser needs at least one slot");
  }
}

std::string model_config_to_json(const ModelConfig & c)
{
  json j = {
    {"history", c.history},
    {"horizon", c.horizon},
    {"grid", {{"region_m", c.grid.region_m}, {"cells", c.grid.cells}}},
    {"encoder",
     {{"hidden", c.encoder.hidden},
      {"input_scale", c.encoder.input_scale},
      {"frame", c.encoder.frame == InputFrame::Ego ? "ego" : "target_relative"},
      {"variable_length", c.encoder.variable_length},
      {"fixed_steps", c.encoder.fixed_steps}}},
    {"fusion",
     {{"kind", std::string(to_string(c.fusion.kind))},
      {"mask", std::string(to_string(c.fusion.mask))},
      {"k", c.fusion.k},
      {"channels", c.fusion.channels},
      {"embedding", c.fusion.embedding},
      {"conv1_channels", c.fusion.conv1_channels},
      {"conv2_channels", c.fusion.conv2_channels},
      {"con_slots", c.fusion.con_slots}}},
    {"decoder",
     {{"hidden", c.decoder.hidden},
      {"head", std::string(to_string(c.decoder.head))},
      {"input_scale", c.decoder.input_scale},
      {"displacement_scale", c.decoder.displacement_scale},
      {"residual", c.decoder.residual},
      {"lambda_z", c.decoder.lambda_z}}},
  };
  return j.dump();
}

ModelConfig model_config_from_json(const std::string & text)
{
  ModelConfig c;
  try {
    const json j = json::parse(text);
    c.history = j.at("history").get<std::size_t>();
    c.horizon = j.at("horizon").get<std::size_t>();
    c.grid.region_m = j.at("grid").at("region_m").get<double>();
    c.grid.cells = j.at("grid").at("cells").get<std::size_t>();
    const json & e = j.at("encoder");
    c.encoder.hidden = e.at("hidden").get<std::size_t>();
    c.encoder.input_scale = e.at("input_scale").get<double>();
    const auto frame = e.at("frame").get<std::string>();
    if (frame != "ego" && frame != "target_relative") {
      throw std::invalid_argument("unknown encoder frame '" + frame + "'");
    }
    c.encoder.frame = frame == "ego" ? InputFrame::Ego : InputFrame::TargetRelative;
    c.encoder.variable_length = e.at("variable_length").get<bool>();
    c.encoder.fixed_steps = e.at("fixed_steps").get<std::size_t>();
    const json & f = j.at("fusion");
    const auto kind = parse_fusion_kind(f.at("kind").get<std::string>());
    const auto mask = parse_mask_kind(f.at("mask").get<std::string>());
    if (!kind || !mask) {
      throw std::invalid_argument("unknown fusion kind or mask");
    }
    c.fusion.kind = *kind;
    c.fusion.mask = *mask;
    c.fusion.k = f.at("k").get<std::size_t>();
    c.fusion.channels = f.at("channels").get<std::size_t>();
    c.fusion.embedding = f.at("embedding").get<std::size_t>();
    c.fusion.conv1_channels = f.at("conv1_channels").get<std::size_t>();
    c.fusion.conv2_channels = f.at("conv2_channels").get<std::size_t>();
    c.fusion.con_slots = f.at("con_slots").get<std::size_t>();
    const json & d = j.at("decoder");
    c.decoder.hidden = d.at("hidden").get<std::size_t>();
    const auto head = parse_head_kind(d.at("head").get<std::string>());
    if (!head) {
      throw std::invalid_argument("unknown decoder head");
    }
    c.decoder.head = *head;
    c.decoder.input_scale = d.at("input_scale").get<double>();
    c.decoder.displacement_scale = d.at("displacement_scale").get<double>();
    c.decoder.residual = d.at("residual").get<bool>();
    c.decoder.lambda_z = d.at("lambda_z").get<double>();
  } catch (const json::exception & e) {
    throw std::invalid_argument(std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

ParamStore<float> init_model_params(const ModelConfig & config, std::uint64_t seed)
{
  config.validate();
  Rng rng(seed);
  ParamStore<float> params;
  Rng enc = rng.fork(1);
  Rng fus = rng.fork(2);
  Rng dec = rng.fork(3);
  init_encoder_params(params, config.encoder, enc);
  init_fusion_params(params, config.fusion, fus);
  init_decoder_params(params, config.decoder, dec);
  return params;
}

void check_params_compatible(const ParamStore<float> & params, const ModelConfig & config)
{
  const ParamStore<float> expected = init_model_params(config, 0);
  for (const auto & name : expected.names()) {
    if (!params.contains(name)) {
      throw std::invalid_argument("parameter '" + name + "' is missing from the checkpoint");
    }
    const Shape & want = expected.value(name).shape();
    const Shape & got = params.value(name).shape();
    if (got != want) {
      throw std::invalid_argument("parameter '" + name + "' has shape " + format_shape(got) +
                                  " but the configuration expects " + format_shape(want));
    }
  }
  for (const auto & name : params.names()) {
    if (!expected.contains(name)) {
      throw std::invalid_argument("parameter '" + name + "' is not used by the configuration");
    }
  }
}

namespace
{

Vec3 row_point(const Tensor<float> & t, std::size_t base)
{
  return {t[base], t[base + 1], t[base + 2]};
}

Vec3 minus(const Vec3 & a, const Vec3 & b)
{
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}

}  // namespace

std::vector<Vec3> row_ground_truth(const SceneBatch & batch, std::size_t row)
{
  std::vector<Vec3> gt;
  for (std::size_t t = 0; t < batch.horizon; ++t) {
    gt.push_back(row_point(batch.ground_truth, (row * batch.horizon + t) * 3));
  }
  return gt;
}

template <typename T>
RowForward<T> forward_row(
  Graph<T> & g, const SceneBatch & batch, std::size_t row, const ModelConfig & config, bool teacher_forcing)
{
  if (batch.history != config.history) {
    throw std::invalid_argument("forward_row: batch history " + std::to_string(batch.history) +
                                " differs from the model's " + std::to_string(config.history));
  }
  RowForward<T> f;
  f.origin = encoding_origin(batch, row, config.encoder);
  f.encoding = encode_row(g, batch, row, config.encoder);
  f.social = social_embedding(g, f.encoding.target, f.encoding.neighbors, batch, row, config.fusion);
  f.fused = fuse(g, f.encoding.target, f.social.embedding);
  const Vec3 last = minus(row_point(batch.target_history, (row * batch.history + batch.history - 1) * 3), f.origin);
  std::vector<Vec3> teacher;
  if (teacher_forcing) {
    if (batch.horizon != config.horizon) {
      throw std::invalid_argument("forward_row: batch horizon " + std::to_string(batch.horizon) +
                                  " differs from the model's " + std::to_string(config.horizon));
    }
    for (const auto & p : row_ground_truth(batch, row)) {
      teacher.push_back(minus(p, f.origin));
    }
  }
  f.decoded = decode(g, f.fused, config.horizon, last, config.decoder, teacher_forcing ? &teacher : nullptr);
  return f;
}

template <typename T>
Var row_loss(Graph<T> & g, const RowForward<T> & fwd, const SceneBatch & batch, std::size_t row,
             const ModelConfig & config)
{
  std::vector<Vec3> gt;
  for (const auto & p : row_ground_truth(batch, row)) {
    gt.push_back(minus(p, fwd.origin));
  }
  if (config.decoder.head == HeadKind::L2) {
    return ops::l2_loss(g, fwd.decoded.points, gt);
  }
  return ops::gaussian_nll(g, fwd.decoded.gauss, gt, static_cast<T>(config.decoder.lambda_z));
}

Prediction predict_row(const ParamStore<float> & params, const SceneBatch & batch, std::size_t row,
                       const ModelConfig & config)
{
  Graph<float> g(params);
  const RowForward<float> f = forward_row(g, batch, row, config, false);
  Prediction p;
  p.instance_id = batch.instance_ids[row];
  p.agent_class = batch.target_class[row];
  const std::size_t n = config.horizon;
  p.points = Tensor<float>(Shape{n, 3});
  const double o[3] = {f.origin.x, f.origin.y, f.origin.z};
  for (std::size_t t = 0; t < n; ++t) {
    const auto & v = g.value(f.decoded.points[t]);
    for (std::size_t k = 0; k < 3; ++k) {
      p.points[t * 3 + k] = static_cast<float>(static_cast<double>(v[k]) + o[k]);
    }
  }
  if (config.decoder.head == HeadKind::Gaussian) {
    Tensor<float> gauss(Shape{n, 6});
    for (std::size_t t = 0; t < n; ++t) {
      const auto gp = gaussian_from_raw(g.value(f.decoded.gauss[t]).data());
      const double vals[6] = {gp.mu_x + o[0], gp.mu_y + o[1], gp.sigma_x, gp.sigma_y, gp.rho, gp.z + o[2]};
      for (std::size_t k = 0; k < 6; ++k) {
        gauss[t * 6 + k] = static_cast<float>(vals[k]);
      }
    }
    p.gauss = std::move(gauss);
  }
  return p;
}

std::vector<Prediction> predict(const ParamStore<float> & params, const SceneBatch & batch,
                                const ModelConfig & config)
{
  std::vector<Prediction> out;
  out.reserve(batch.size);
  for (std::size_t i = 0; i < batch.size; ++i) {
    out.push_back(predict_row(params, batch, i, config));
  }
  return out;
}

#define SOCIALMASK_INSTANTIATE_MODEL(T)                                                                      \
  template RowForward<T> forward_row<T>(Graph<T> &, const SceneBatch &, std::size_t, const ModelConfig &,  \
                                        bool);                                                               \
  template Var row_loss<T>(Graph<T> &, const RowForward<T> &, const SceneBatch &, std::size_t,              \
                           const ModelConfig &);

SOCIALMASK_INSTANTIATE_MODEL(float)
SOCIALMASK_INSTANTIATE_MODEL(double)

}  // namespace socialmask
