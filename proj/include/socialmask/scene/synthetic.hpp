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

#ifndef SOCIALMASK__SCENE__SYNTHETIC_HPP_
#define SOCIALMASK__SCENE__SYNTHETIC_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socialmask/scene/types.hpp"

namespace socialmask
{

enum class Density { Low, High };

std::string_view to_string(Density density);
std::optional<Density> parse_density(std::string_view name);

/// Relative spawn weights per agent class. Pedestrians stay in view far
/// longer than vehicles, so these defaults still yield roughly 40% vehicle,
/// 33% pedestrian and 27% rider prediction instances.
struct ClassMix
{
  double pedestrian = 0.1;
  double vehicle = 0.8;
  double rider = 0.1;
};

struct SyntheticConfig
{
  Density density = Density::High;
  ClassMix class_mix;
  std::uint64_t seed = 1;
  std::size_t n_frames = 60;
  double frame_period_s = 0.2;
  /// Car following for vehicles and social-force repulsion for pedestrians
  /// and riders. Off means every agent moves as if alone.
  bool interaction = true;
  /// Std-dev of Gaussian noise added to recorded x/y, meters.
  double position_noise_m = 0.0;
  std::string scene_id = "synthetic";
};

/// Throws std::invalid_argument describing the first invalid field.
void validate(const SyntheticConfig & config);

/// Planar polyline parameterized by arc length.
class Polyline
{
public:
  Polyline() = default;
  explicit Polyline(std::vector<std::pair<double, double>> points);

  double length() const { return arc_.empty() ? 0.0 : arc_.back(); }
  std::pair<double, double> at(double arc) const;
  /// Unit tangent at `arc`.
  std::pair<double, double> tangent(double arc) const;
  /// Arc length of the closest point and signed lateral offset (left
  /// positive) of (x, y) from the polyline. Only segments overlapping
  /// [arc_lo, arc_hi] are searched.
  std::pair<double, double> project(
    double x, double y, double arc_lo = 0.0, double arc_hi = std::numeric_limits<double>::infinity()) const;
  /// Planar distance from (x, y) to the polyline.
  double distance_to(double x, double y) const;

  const std::vector<std::pair<double, double>> & points() const { return points_; }

private:
  std::size_t segment_at(double arc) const;

  std::vector<std::pair<double, double>> points_;
  std::vector<double> arc_;
};

struct SimulationTrace
{
  Scene scene;
  /// Route followed by each vehicle (lane, possibly with a lane change).
  std::map<std::int64_t, Polyline> vehicle_routes;
};

/// Runs the simulator and returns the recorded scene plus vehicle routes.
SimulationTrace simulate_scene(const SyntheticConfig & config);

/// Deterministic in `config` (including the seed).
Scene generate_synthetic_scene(const SyntheticConfig & config);

/// `count` scenes with per-scene seeds derived from `config.seed`; scene ids
/// are "<scene_id>-<seed>-<index>".
std::vector<Scene> generate_synthetic_corpus(const SyntheticConfig & config, std::size_t count);

}  // namespace socialmask

#endif  // SOCIALMASK__SCENE__SYNTHETIC_HPP_
