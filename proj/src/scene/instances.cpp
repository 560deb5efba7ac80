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

#include "socialmask/scene/instances.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace socialmask
{

ExtractionReport & ExtractionReport::operator+=(const ExtractionReport & o)
{
  instances += o.instances;
  skipped_targets += o.skipped_targets;
  cell_collisions += o.cell_collisions;
  out_of_region += o.out_of_region;
  return *this;
}

PredictionInstance assemble_instance(
  AgentTrack target, const std::vector<AgentTrack> & candidates, std::vector<Vec3> ground_truth,
  const GridSpec & grid, ExtractionReport * report)
{
  if (target.samples.empty()) {
    throw std::invalid_argument("assemble_instance: target track is empty");
  }
  const Vec3 center = target.last_position();

  struct Slot
  {
    const AgentTrack * track;
    double dist;
  };
  // Row-major cell index -> current occupant.
  std::map<std::size_t, Slot> occupied;
  for (const auto & cand : candidates) {
    if (cand.samples.empty() || cand.agent_id == target.agent_id) {
      continue;
    }
    const Vec3 & p = cand.last_position();
    const auto cell = assign_grid_cell(p.x - center.x, p.y - center.y, grid);
    if (!cell) {
      if (report != nullptr) {
        ++report->out_of_region;
      }
      continue;
    }
    const std::size_t key = cell->row * grid.cells + cell->col;
    const double d = planar_distance(p, center);
    auto [it, inserted] = occupied.try_emplace(key, Slot{&cand, d});
    if (!inserted) {
      if (report != nullptr) {
        ++report->cell_collisions;
      }
      const Slot & cur = it->second;
      if (d < cur.dist || (d == cur.dist && cand.agent_id < cur.track->agent_id)) {
        it->second = Slot{&cand, d};
      }
    }
  }

  std::vector<std::pair<std::size_t, Slot>> kept(occupied.begin(), occupied.end());
  std::sort(kept.begin(), kept.end(), [](const auto & a, const auto & b) {
    if (a.second.dist != b.second.dist) {
      return a.second.dist < b.second.dist;
    }
    return a.second.track->agent_id < b.second.track->agent_id;
  });

  PredictionInstance inst;
  inst.anchor_t = target.samples.back().t;
  for (const auto & [key, slot] : kept) {
    inst.neighbors.push_back(*slot.track);
    inst.cells.push_back(GridCell{key / grid.cells, key % grid.cells});
  }
  inst.target = std::move(target);
  inst.ground_truth = std::move(ground_truth);
  return inst;
}

ExtractionResult extract_instances(const Scene & scene, const ExtractionConfig & config)
{
  if (config.history < 1 || config.horizon < 1 || config.anchor_stride < 1) {
    throw std::invalid_argument("extract_instances: history, horizon and anchor stride must be positive");
  }
  ExtractionResult result;
  const std::size_t n = scene.frames.size();
  if (n < config.history + config.horizon) {
    return result;
  }

  std::vector<std::unordered_map<std::int64_t, const AgentObservation *>> index(n);
  for (std::size_t f = 0; f < n; ++f) {
    for (const auto & a : scene.frames[f].agents) {
      index[f].emplace(a.id, &a);
    }
  }

  // Contiguous run of `id` ending at frame `anchor`, at most `max_len` long.
  auto run_ending_at = [&](std::int64_t id, std::size_t anchor, std::size_t max_len) {
    AgentTrack track;
    track.agent_id = id;
    track.agent_class = index[anchor].at(id)->agent_class;
    std::size_t first = anchor;
    while (anchor - first + 1 < max_len && first > 0 && index[first - 1].count(id) != 0) {
      --first;
    }
    for (std::size_t f = first; f <= anchor; ++f) {
      track.samples.push_back(TrackSample{scene.frames[f].t, index[f].at(id)->position});
    }
    return track;
  };

  for (std::size_t anchor = config.history - 1; anchor + config.horizon < n; anchor += config.anchor_stride) {
    const auto & present = scene.frames[anchor].agents;
    for (const auto & target_obs : present) {
      const std::int64_t id = target_obs.id;
      bool complete = true;
      for (std::size_t f = anchor + 1 - config.history; f <= anchor + config.horizon && complete; ++f) {
        complete = index[f].count(id) != 0;
      }
      if (!complete) {
        ++result.report.skipped_targets;
        continue;
      }

      AgentTrack target = run_ending_at(id, anchor, config.history);
      std::vector<Vec3> future;
      for (std::size_t f = anchor + 1; f <= anchor + config.horizon; ++f) {
        future.push_back(index[f].at(id)->position);
      }
      std::vector<AgentTrack> candidates;
      for (const auto & other : present) {
        if (other.id != id) {
          candidates.push_back(run_ending_at(other.id, anchor, config.history));
        }
      }
      PredictionInstance inst =
        assemble_instance(std::move(target), candidates, std::move(future), config.grid, &result.report);
      inst.scene_id = scene.scene_id;
      inst.instance_id = scene.scene_id + ":" + std::to_string(inst.anchor_t) + ":" + std::to_string(id);
      result.instances.push_back(std::move(inst));
    }
  }
  result.report.instances = result.instances.size();
  return result;
}

ExtractionResult extract_instances(const std::vector<Scene> & scenes, const ExtractionConfig & config)
{
  ExtractionResult all;
  for (const auto & scene : scenes) {
    auto one = extract_instances(scene, config);
    all.report += one.report;
    for (auto & inst : one.instances) {
      all.instances.push_back(std::move(inst));
    }
  }
  all.report.instances = all.instances.size();
  return all;
}

}  // namespace socialmask
