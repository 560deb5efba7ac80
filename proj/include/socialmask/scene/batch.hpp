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

#ifndef SOCIALMASK__SCENE__BATCH_HPP_
#define SOCIALMASK__SCENE__BATCH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "socialmask/core/tensor.hpp"
#include "socialmask/scene/instances.hpp"

namespace socialmask
{

/**
 * @brief Padded tensors for b prediction instances.
 *
 * Neighbor slot (i, j) is valid when `neighbor_length[i * n_b + j] > 0`.
 * Histories are left-aligned in time: sample s of a length-L track sits at
 * index s < L, the tail is zero. Every padded entry is zero and nothing
 * downstream reads it. An instance with no neighbors still gets one (masked)
 * slot, so n_b >= 1 and t_b >= 1.
 */
struct SceneBatch
{
  std::size_t size = 0;           // b
  std::size_t history = 0;        // t_h
  std::size_t horizon = 0;        // t_f
  std::size_t max_neighbors = 0;  // n_b
  std::size_t max_history = 0;    // t_b

  Tensor<float> target_history;    // (b, t_h, 3)
  std::vector<AgentClass> target_class;
  Tensor<float> neighbor_history;  // (b, n_b, t_b, 3)
  std::vector<std::int32_t> neighbor_length;  // b * n_b
  std::vector<AgentClass> neighbor_class;     // b * n_b
  std::vector<GridCell> neighbor_cell;        // b * n_b
  std::vector<float> neighbor_distance;       // b * n_b, meters at the anchor
  Tensor<float> ground_truth;      // (b, t_f, 3)
  std::vector<std::string> instance_ids;

  bool neighbor_valid(std::size_t row, std::size_t slot) const
  {
    return neighbor_length[row * max_neighbors + slot] > 0;
  }
  std::size_t valid_neighbor_count(std::size_t row) const;
};

/// Packs instances (all with the same history and horizon) into one batch.
SceneBatch build_batch(std::span<const PredictionInstance> instances);

/// Splits instances, in order, into consecutive batches of at most
/// `batch_size`.
std::vector<SceneBatch> build_batches(std::span<const PredictionInstance> instances, std::size_t batch_size);

}  // namespace socialmask

#endif  // SOCIALMASK__SCENE__BATCH_HPP_
