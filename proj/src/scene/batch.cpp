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

#include "socialmask/scene/batch.hpp"

#include <algorithm>
#include <stdexcept>

namespace socialmask
{

std::size_t SceneBatch::valid_neighbor_count(std::size_t row) const
{
  std::size_t n = 0;
  for (std::size_t j = 0; j < max_neighbors; ++j) {
    n += neighbor_valid(row, j) ? 1 : 0;
  }
  return n;
}

SceneBatch build_batch(std::span<const PredictionInstance> instances)
{
  if (instances.empty()) {
    throw std::invalid_argument("build_batch: no instances");
  }
  SceneBatch b;
  b.size = instances.size();
  b.history = instances.front().target.samples.size();
  b.horizon = instances.front().ground_truth.size();
  b.max_neighbors = 1;
  b.max_history = 1;
  for (const auto & inst : instances) {
    if (inst.target.samples.size() != b.history || inst.ground_truth.size() != b.horizon) {
      throw std::invalid_argument("build_batch: instance '" + inst.instance_id +
                                  "' has a different history or horizon length");
    }
    if (inst.neighbors.size() != inst.cells.size()) {
      throw std::invalid_argument("build_batch: instance '" + inst.instance_id + "' has unassigned neighbors");
    }
    b.max_neighbors = std::max(b.max_neighbors, inst.neighbors.size());
    for (const auto & n : inst.neighbors) {
      b.max_history = std::max(b.max_history, n.samples.size());
    }
  }

  const std::size_t B = b.size;
  const std::size_t NB = b.max_neighbors;
  const std::size_t TB = b.max_history;
  b.target_history = Tensor<float>(Shape{B, b.history, 3});
  b.neighbor_history = Tensor<float>(Shape{B, NB, TB, 3});
  b.ground_truth = Tensor<float>(Shape{B, b.horizon, 3});
  b.neighbor_length.assign(B * NB, 0);
  b.neighbor_class.assign(B * NB, AgentClass::Pedestrian);
  b.neighbor_cell.assign(B * NB, GridCell{});
  b.neighbor_distance.assign(B * NB, 0.0f);

  auto put = [](float * dst, const Vec3 & p) {
    dst[0] = static_cast<float>(p.x);
    dst[1] = static_cast<float>(p.y);
    dst[2] = static_cast<float>(p.z);
  };

  for (std::size_t i = 0; i < B; ++i) {
    const auto & inst = instances[i];
    b.instance_ids.push_back(inst.instance_id);
    b.target_class.push_back(inst.target.agent_class);
    for (std::size_t t = 0; t < b.history; ++t) {
      put(&b.target_history[(i * b.history + t) * 3], inst.target.samples[t].position);
    }
    for (std::size_t t = 0; t < b.horizon; ++t) {
      put(&b.ground_truth[(i * b.horizon + t) * 3], inst.ground_truth[t]);
    }
    const Vec3 center = inst.target.last_position();
    for (std::size_t j = 0; j < inst.neighbors.size(); ++j) {
      const auto & n = inst.neighbors[j];
      const std::size_t slot = i * NB + j;
      b.neighbor_length[slot] = static_cast<std::int32_t>(n.samples.size());
      b.neighbor_class[slot] = n.agent_class;
      b.neighbor_cell[slot] = inst.cells[j];
      b.neighbor_distance[slot] = static_cast<float>(planar_distance(n.last_position(), center));
      for (std::size_t t = 0; t < n.samples.size(); ++t) {
        put(&b.neighbor_history[(slot * TB + t) * 3], n.samples[t].position);
      }
    }
  }
  return b;
}

std::vector<SceneBatch> build_batches(std::span<const PredictionInstance> instances, std::size_t batch_size)
{
  if (batch_size == 0) {
    throw std::invalid_argument("build_batches: batch size must be positive");
  }
  std::vector<SceneBatch> out;
  for (std::size_t start = 0; start < instances.size(); start += batch_size) {
    const std::size_t n = std::min(batch_size, instances.size() - start);
    out.push_back(build_batch(instances.subspan(start, n)));
  }
  return out;
}

}  // namespace socialmask
