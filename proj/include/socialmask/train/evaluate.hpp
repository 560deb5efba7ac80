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

#ifndef SOCIALMASK__TRAIN__EVALUATE_HPP_
#define SOCIALMASK__TRAIN__EVALUATE_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "socialmask/core/param_store.hpp"
#include "socialmask/model/model.hpp"
#include "socialmask/scene/instances.hpp"
#include "socialmask/train/metrics.hpp"

namespace socialmask
{

/// Autoregressive model predictions, in instance order.
std::vector<Prediction> predict_instances(
  const ParamStore<float> & params, const ModelConfig & config, std::span<const PredictionInstance> instances,
  std::size_t batch_size = 256);

std::vector<Trajectory> prediction_points(const std::vector<Prediction> & predictions);
std::vector<Trajectory> ground_truths(std::span<const PredictionInstance> instances);
std::vector<AgentClass> target_classes(std::span<const PredictionInstance> instances);

/**
 * Single-stream calls per second of one full prediction: neighbor grid
 * assignment, batch packing and the forward pass. Cycles through
 * `instances` for `calls` calls.
 */
double measure_throughput(
  const ParamStore<float> & params, const ModelConfig & config, std::span<const PredictionInstance> instances,
  std::size_t calls);

/// Metrics of the model on `instances`; throughput is measured when
/// `throughput_calls` > 0.
MetricsReport evaluate_model(
  const ParamStore<float> & params, const ModelConfig & config, std::span<const PredictionInstance> instances,
  std::size_t throughput_calls = 1000);

/// Metrics of any per-instance predictor.
MetricsReport evaluate_predictor(
  const std::function<Trajectory(const PredictionInstance &)> & predictor,
  std::span<const PredictionInstance> instances);

/// Metrics of the least-squares line baseline.
MetricsReport evaluate_linear_regression(std::span<const PredictionInstance> instances);

}  // namespace socialmask

#endif  // SOCIALMASK__TRAIN__EVALUATE_HPP_
