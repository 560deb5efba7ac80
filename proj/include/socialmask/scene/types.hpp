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

#ifndef SOCIALMASK__SCENE__TYPES_HPP_
#define SOCIALMASK__SCENE__TYPES_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace socialmask
{

enum class AgentClass : std::uint8_t { Pedestrian = 0, Vehicle = 1, Rider = 2 };

inline constexpr std::size_t kAgentClassCount = 3;
inline constexpr std::array<AgentClass, kAgentClassCount> kAgentClasses = {
  AgentClass::Pedestrian, AgentClass::Vehicle, AgentClass::Rider};

std::string_view to_string(AgentClass cls);
std::optional<AgentClass> parse_agent_class(std::string_view name);
inline std::size_t class_index(AgentClass cls) { return static_cast<std::size_t>(cls); }

/// Ego-relative position in meters.
struct Vec3
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Vec3 &) const = default;
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double planar_distance(const Vec3 & a, const Vec3 & b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double distance(const Vec3 & a, const Vec3 & b)
{
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

struct TrackSample
{
  std::int64_t t = 0;
  Vec3 position;

  bool operator==(const TrackSample &) const = default;
};

/// One agent's observed positions; frame indices strictly increase.
struct AgentTrack
{
  std::int64_t agent_id = 0;
  AgentClass agent_class = AgentClass::Vehicle;
  std::vector<TrackSample> samples;

  const Vec3 & last_position() const { return samples.back().position; }
  bool operator==(const AgentTrack &) const = default;
};

struct AgentObservation
{
  std::int64_t id = 0;
  AgentClass agent_class = AgentClass::Vehicle;
  Vec3 position;

  bool operator==(const AgentObservation &) const = default;
};

struct Frame
{
  std::int64_t t = 0;
  std::vector<AgentObservation> agents;

  bool operator==(const Frame &) const = default;
};

/// A sequence of frames; agents may enter and leave between frames.
struct Scene
{
  std::string scene_id;
  double frame_period_s = 0.2;
  std::vector<Frame> frames;

  bool operator==(const Scene &) const = default;
};

/// Throws std::invalid_argument on broken invariants (non-increasing frame
/// indices, duplicate agent ids within a frame, non-finite coordinates).
void validate_scene(const Scene & scene);

}  // namespace socialmask

#endif  // SOCIALMASK__SCENE__TYPES_HPP_
