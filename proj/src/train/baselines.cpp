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

#include "socialmask/train/baselines.hpp"

#include <stdexcept>

namespace socialmask
{

Trajectory linear_regression_baseline(const Trajectory & history, std::size_t horizon)
{
  const std::size_t n = history.size();
  if (n < 2) {
    throw std::invalid_argument("linear_regression_baseline: need at least 2 history samples");
  }
  const double t_mean = (static_cast<double>(n) + 1.0) / 2.0;
  double stt = 0.0;
  Vec3 mean;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = static_cast<double>(i + 1) - t_mean;
    stt += dt * dt;
    mean.x += history[i].x;
    mean.y += history[i].y;
    mean.z += history[i].z;
  }
  mean = {mean.x / static_cast<double>(n), mean.y / static_cast<double>(n), mean.z / static_cast<double>(n)};
  Vec3 slope;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = static_cast<double>(i + 1) - t_mean;
    slope.x += dt * (history[i].x - mean.x);
    slope.y += dt * (history[i].y - mean.y);
    slope.z += dt * (history[i].z - mean.z);
  }
  slope = {slope.x / stt, slope.y / stt, slope.z / stt};
  Trajectory out;
  for (std::size_t k = 1; k <= horizon; ++k) {
    const double dt = static_cast<double>(n + k) - t_mean;
    out.push_back({mean.x + slope.x * dt, mean.y + slope.y * dt, mean.z + slope.z * dt});
  }
  return out;
}

ModelConfig lstm_ae_config(const ModelConfig & base)
{
  ModelConfig c = base;
  c.fusion.kind = FusionKind::None;
  c.decoder.head = HeadKind::L2;
  return c;
}

}  // namespace socialmask
