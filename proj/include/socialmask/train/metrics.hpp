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

#ifndef SOCIALMASK__TRAIN__METRICS_HPP_
#define SOCIALMASK__TRAIN__METRICS_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "socialmask/scene/types.hpp"

namespace socialmask
{

using Trajectory = std::vector<Vec3>;

/// Mean over instances of the mean per-step Euclidean displacement.
/// Throws std::invalid_argument on empty or mismatched input.
double ade(const std::vector<Trajectory> & preds, const std::vector<Trajectory> & gts);
/// Mean over instances of the largest per-step displacement.
double mde(const std::vector<Trajectory> & preds, const std::vector<Trajectory> & gts);
/// Mean over instances of the final-step displacement.
double fde(const std::vector<Trajectory> & preds, const std::vector<Trajectory> & gts);

struct DisplacementMetrics
{
  std::size_t count = 0;
  double ade = 0.0;
  double mde = 0.0;
  double fde = 0.0;
};

struct MetricsReport
{
  DisplacementMetrics all;
  /// Indexed by class_index; empty when the class is absent from the data.
  std::array<std::optional<DisplacementMetrics>, kAgentClassCount> per_class;
  /// Single-stream prediction calls per second (0 when not measured).
  double throughput = 0.0;
  std::size_t throughput_calls = 0;
};

MetricsReport compute_metrics(
  const std::vector<Trajectory> & preds, const std::vector<Trajectory> & gts, const std::vector<AgentClass> & classes);

/// {"all"|"pedestrian"|"vehicle"|"rider": {"ADE", "MDE", "FDE"} or null}.
std::string metrics_to_json(const MetricsReport & report);
/// Instance counts and throughput, kept apart from the metric table.
std::string metrics_details_json(const MetricsReport & report);

}  // namespace socialmask

#endif  // SOCIALMASK__TRAIN__METRICS_HPP_
