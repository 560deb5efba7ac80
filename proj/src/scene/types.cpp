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

#include "socialmask/scene/types.hpp"

#include <stdexcept>
#include <unordered_set>

namespace socialmask
{

std::string_view to_string(AgentClass cls)
{
  switch (cls) {
    case AgentClass::Pedestrian:
      return "pedestrian";
    case AgentClass::Vehicle:
      return "vehicle";
    case AgentClass::Rider:
      return "rider";
  }
  return "unknown";
}

std::optional<AgentClass> parse_agent_class(std::string_view name)
{
  for (const auto cls : kAgentClasses) {
    if (to_string(cls) == name) {
      return cls;
    }
  }
  return std::nullopt;
}

void validate_scene(const Scene & scene)
{
  if (!(scene.frame_period_s > 0.0) || !std::isfinite(scene.frame_period_s)) {
    throw std::invalid_argument("scene '" + scene.scene_id + "': frame period must be positive");
  }
  for (std::size_t i = 0; i < scene.frames.size(); ++i) {
    const Frame & f = scene.frames[i];
    if (i > 0 && f.t <= scene.frames[i - 1].t) {
      throw std::invalid_argument("scene '" + scene.scene_id + "': frame indices must strictly increase (t=" +
                                  std::to_string(f.t) + ")");
    }
    std::unordered_set<std::int64_t> seen;
    for (const auto & a : f.agents) {
      if (!seen.insert(a.id).second) {
        throw std::invalid_argument("scene '" + scene.scene_id + "': agent " + std::to_string(a.id) +
                                    " appears twice in frame " + std::to_string(f.t));
      }
      if (!a.position.finite()) {
        throw std::invalid_argument("scene '" + scene.scene_id + "': non-finite position for agent " +
                                    std::to_string(a.id) + " in frame " + std::to_string(f.t));
      }
    }
  }
}

}  // namespace socialmask
