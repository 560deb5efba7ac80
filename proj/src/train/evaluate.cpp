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

#include "socialmask/train/evaluate.hpp"

#include <chrono>
#include <stdexcept>

#include "socialmask/scene/batch.hpp"
#include "socialmask/train/baselines.hpp"

namespace socialmask
{

std::vector<Prediction> predict_instances(
  const ParamStore<float> & params, const ModelConfig & config, std::span<const PredictionInstance> instances,
  std::size_t batch_size)
{
  std::vector<Prediction> out;
  out.reserve(instances.size());
  for (const auto & batch : build_batches(instances, batch_size)) {
    for (auto & p : predict(params, batch, config)) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<Trajectory> prediction_points(const std::vector<Prediction> & predictions)
{
  std::vector<Trajectory> out;
  out.reserve(predictions.size());
  for (const auto & p : predictions) {
    Trajectory t;
    for (std::size_t s = 0; s < p.points.dim(0); ++s) {
      t.push_back({p.points[s * 3], p.points[s * 3 + 1], p.points[s * 3 + 2]});
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Trajectory> ground_truths(std::span<const PredictionInstance> instances)
{
  std::vector<Trajectory> out;
  out.reserve(instances.size());
  for (const auto & inst : instances) {
    out.push_back(inst.ground_truth);
  }
  return out;
}

std::vector<AgentClass> target_classes(std::span<const PredictionInstance> instances)
{
  std::vector<AgentClass> out;
  out.reserve(instances.size());
  for (const auto & inst : instances) {
    out.push_back(inst.target.agent_class);
  }
  return out;
}

double measure_throughput(
  const ParamStore<float> & params, const ModelConfig & config, std::span<const PredictionInstance> instances,
  std::size_t calls)
{
  if (instances.empty() || calls == 0) {
    throw std::invalid_argument("measure_throughput: need instances and a positive call count");
  }
  const auto start = std::chrono::steady_clock::now();
  double sink = 0.0;
  for (std::size_t i = 0; i < calls; ++i) {
    const PredictionInstance & src = instances[i % instances.size()];
    PredictionInstance inst = assemble_instance(src.target, src.neighbors, src.ground_truth, config.grid);
    inst.instance_id = src.instance_id;
    const SceneBatch batch = build_batch(std::span<const PredictionInstance>(&inst, 1));
    sink += predict_row(params, batch, 0, config).points[0];
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  // Keeps the loop observable to the optimizer.
  if (sink == -1.2345e300) {
    return 0.0;
  }
  return static_cast<double>(calls) / elapsed.count();
}

MetricsReport evaluate_model(
  const ParamStore<float> & params, const ModelConfig & config, std::span<const PredictionInstance> instances,
  std::size_t throughput_calls)
{
  const auto preds = predict_instances(params, config, instances);
  MetricsReport r = compute_metrics(prediction_points(preds), ground_truths(instances), target_classes(instances));
  if (throughput_calls > 0) {
    r.throughput = measure_throughput(params, config, instances, throughput_calls);
    r.throughput_calls = throughput_calls;
  }
  return r;
}

MetricsReport evaluate_predictor(
  const std::function<Trajectory(const PredictionInstance &)> & predictor,
  std::span<const PredictionInstance> instances)
{
  std::vector<Trajectory> preds;
  preds.reserve(instances.size());
  for (const auto & inst : instances) {
    preds.push_back(predictor(inst));
  }
  return compute_metrics(preds, ground_truths(instances), target_classes(instances));
}

MetricsReport evaluate_linear_regression(std::span<const PredictionInstance> instances)
{
  return evaluate_predictor(
    [](const PredictionInstance & inst) {
      Trajectory history;
      for (const auto & s : inst.target.samples) {
        history.push_back(s.position);
      }
      return linear_regression_baseline(history, inst.ground_truth.size());
    },
    instances);
}

}  // namespace socialmask
