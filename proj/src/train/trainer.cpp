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

#include "socialmask/train/trainer.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "socialmask/core/rng.hpp"
#include "socialmask/scene/batch.hpp"
#include "socialmask/train/evaluate.hpp"

namespace socialmask
{

void TrainConfig::validate() const
{
  model.validate();
  if (!(lr > 0.0) || !(lr_decay > 0.0) || decay_every == 0) {
    throw std::invalid_argument("train config: lr, lr_decay and decay_every must be positive");
  }
  if (batch_size == 0 || max_epochs == 0) {
    throw std::invalid_argument("train config: batch_size and max_epochs must be positive");
  }
}

double learning_rate(const TrainConfig & config, std::size_t epoch)
{
  return config.lr * std::pow(config.lr_decay, static_cast<double>(epoch / config.decay_every));
}

DivergenceError::DivergenceError(std::size_t e, std::size_t b, double loss)
: std::runtime_error("training diverged at epoch " + std::to_string(e) + ", batch " + std::to_string(b) +
                     ": loss " + std::to_string(loss)),
  epoch(e),
  batch(b)
{
}

namespace
{

/// Accumulates the mean-loss gradient of `batch` into params and returns
/// the mean loss.
double batch_step(ParamStore<float> & params, const SceneBatch & batch, const ModelConfig & config,
                  bool teacher_forcing)
{
  const float seed = 1.0f / static_cast<float>(batch.size);
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size; ++i) {
    Graph<float> g(params);
    const auto fwd = forward_row(g, batch, i, config, teacher_forcing);
    const Var loss = row_loss(g, fwd, batch, i, config);
    total += static_cast<double>(g.value(loss)[0]);
    g.backward(loss, params, seed);
  }
  return total / static_cast<double>(batch.size);
}

}  // namespace

double mean_loss(const ParamStore<float> & params, const ModelConfig & config,
                 std::span<const PredictionInstance> instances, std::size_t batch_size, bool teacher_forcing)
{
  if (instances.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double total = 0.0;
  for (const auto & batch : build_batches(instances, batch_size)) {
    for (std::size_t i = 0; i < batch.size; ++i) {
      Graph<float> g(params);
      const auto fwd = forward_row(g, batch, i, config, teacher_forcing);
      total += static_cast<double>(g.value(row_loss(g, fwd, batch, i, config))[0]);
    }
  }
  return total / static_cast<double>(instances.size());
}

TrainResult train(
  const TrainConfig & config, std::span<const PredictionInstance> train_set,
  std::span<const PredictionInstance> val_set, const EpochCallback & on_epoch)
{
  config.validate();
  if (train_set.empty()) {
    throw std::invalid_argument("train: no training instances");
  }
  ParamStore<float> params = init_model_params(config.model, config.seed);
  Adam<float> adam(config.adam);
  Rng shuffle_rng = Rng(config.seed).fork(0x5348);

  TrainResult result;
  result.best_val_ade = std::numeric_limits<double>::infinity();
  std::size_t since_improvement = 0;
  std::int64_t step = 0;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double lr = learning_rate(config, epoch);
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t n = std::min(config.batch_size, order.size() - start);
      std::vector<PredictionInstance> members;
      members.reserve(n);
      for (std::size_t k = 0; k < n; ++k) {
        members.push_back(train_set[order[start + k]]);
      }
      const SceneBatch batch = build_batch(members);
      params.zero_grad();
      const double loss = batch_step(params, batch, config.model, config.teacher_forcing);
      if (!std::isfinite(loss)) {
        throw DivergenceError(epoch, batch_index, loss);
      }
      adam.step(params, lr, ++step);
      loss_sum += loss * static_cast<double>(n);
    }

    EpochLog log;
    log.epoch = epoch;
    log.lr = lr;
    log.train_loss = loss_sum / static_cast<double>(order.size());
    if (!val_set.empty()) {
      log.val_loss = mean_loss(params, config.model, val_set, 256, config.teacher_forcing);
      const auto preds = predict_instances(params, config.model, val_set);
      log.val_ade = ade(prediction_points(preds), ground_truths(val_set));
    } else {
      log.val_loss = std::numeric_limits<double>::quiet_NaN();
      log.val_ade = std::numeric_limits<double>::quiet_NaN();
    }
    result.log.push_back(log);
    if (on_epoch) {
      on_epoch(log);
    }

    if (val_set.empty()) {
      result.params = params;
      result.best_epoch = epoch;
      continue;
    }
    if (log.val_ade < result.best_val_ade - config.min_improvement || epoch == 0) {
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    if (log.val_ade < result.best_val_ade) {
      result.best_val_ade = log.val_ade;
      result.best_epoch = epoch;
      result.params = params;
    }
    if (since_improvement >= config.patience) {
      result.stopped_early = true;
      break;
    }
  }
  if (val_set.empty()) {
    result.best_val_ade = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

std::string learning_curve_csv(const std::vector<EpochLog> & log)
{
  std::ostringstream out;
  out.precision(9);
  out << "epoch,lr,train_loss,val_loss,val_ade\n";
  for (const auto & e : log) {
    out << e.epoch << ',' << e.lr << ',' << e.train_loss << ',' << e.val_loss << ',' << e.val_ade << '\n';
  }
  return out.str();
}

std::pair<std::vector<Scene>, std::vector<Scene>> split_scenes(
  const std::vector<Scene> & scenes, double fraction, std::uint64_t seed)
{
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("split_scenes: fraction must be in [0, 1]");
  }
  std::vector<std::size_t> order(scenes.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto cut = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(scenes.size())));
  std::pair<std::vector<Scene>, std::vector<Scene>> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < cut ? out.first : out.second).push_back(scenes[order[i]]);
  }
  return out;
}

}  // namespace socialmask
