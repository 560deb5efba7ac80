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

#ifndef SOCIALMASK__SCENE__INSTANCES_HPP_
#define SOCIALMASK__SCENE__INSTANCES_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "socialmask/scene/grid.hpp"
#include "socialmask/scene/types.hpp"

namespace socialmask
{

/**
 * @brief One target agent to forecast at one anchor frame.
 *
 * `target` holds exactly the last t_h observed samples (ending at the
 * anchor). Each neighbor holds its contiguous observed run ending at the
 * anchor, clipped to t_h samples, and `cells[i]` is the grid cell of
 * neighbor i relative to the target's anchor position. Neighbors are sorted
 * by ground-plane distance to the target, then by agent id.
 */
struct PredictionInstance
{
  std::string instance_id;
  std::string scene_id;
  std::int64_t anchor_t = 0;
  AgentTrack target;
  std::vector<AgentTrack> neighbors;
  std::vector<GridCell> cells;
  std::vector<Vec3> ground_truth;

  bool operator==(const PredictionInstance &) const = default;
};

struct ExtractionConfig
{
  std::size_t history = 5;
  std::size_t horizon = 5;
  GridSpec grid;
  /// Anchor frames are taken every `anchor_stride` frames.
  std::size_t anchor_stride = 1;
};

struct ExtractionReport
{
  std::size_t instances = 0;
  /// Agents seen at an anchor frame but lacking full history or future.
  std::size_t skipped_targets = 0;
  /// Neighbors dropped because a nearer agent already held their cell.
  std::size_t cell_collisions = 0;
  /// Other agents at an anchor frame outside the target's region.
  std::size_t out_of_region = 0;

  ExtractionReport & operator+=(const ExtractionReport & o);
};

struct ExtractionResult
{
  std::vector<PredictionInstance> instances;
  ExtractionReport report;
};

/// All prediction instances of a scene. Scenes shorter than
/// history + horizon frames yield none.
ExtractionResult extract_instances(const Scene & scene, const ExtractionConfig & config);

/// Concatenated extraction over several scenes.
ExtractionResult extract_instances(const std::vector<Scene> & scenes, const ExtractionConfig & config);

/**
 * Builds an instance from a target history and candidate neighbor tracks
 * (each ending at the anchor frame): assigns grid cells, keeps the nearest
 * agent per cell (ties to the smaller id) and sorts the survivors.
 */
PredictionInstance assemble_instance(
  AgentTrack target, const std::vector<AgentTrack> & candidates, std::vector<Vec3> ground_truth,
  const GridSpec & grid, ExtractionReport * report = nullptr);

}  // namespace socialmask

#endif  // SOCIALMASK__SCENE__INSTANCES_HPP_
