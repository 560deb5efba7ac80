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

#ifndef SOCIALMASK__TRAIN__BASELINES_HPP_
#define SOCIALMASK__TRAIN__BASELINES_HPP_

#include <cstddef>
#include <vector>

#include "socialmask/model/model.hpp"
#include "socialmask/train/metrics.hpp"

namespace socialmask
{

/**
 * Fits each coordinate of `history` (samples at frames 1..t_h) with an
 * ordinary least-squares line in the frame index and extrapolates frames
 * t_h+1..t_h+horizon. Throws std::invalid_argument when t_h < 2.
 */
Trajectory linear_regression_baseline(const Trajectory & history, std::size_t horizon);

/// Encoder-decoder baseline: `base` with the social embedding fixed to
/// zeros (no neighbors, no mask) and the L2 head.
ModelConfig lstm_ae_config(const ModelConfig & base);

}  // namespace socialmask

#endif  // SOCIALMASK__TRAIN__BASELINES_HPP_
