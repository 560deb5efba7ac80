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

#ifndef SOCIALMASK__CLI__PLOTS_HPP_
#define SOCIALMASK__CLI__PLOTS_HPP_

#include <string>

#include "socialmask/core/tensor.hpp"
#include "socialmask/model/model.hpp"
#include "socialmask/scene/instances.hpp"

namespace socialmask::cli
{

/// Rows series,agent_id,t,x,y,z for the target history, ground truth,
/// prediction and every neighbor history of one instance.
std::string trajectory_csv(const PredictionInstance & instance, const Prediction & prediction);

/// Top view (x right, y up) of the same series as trajectory_csv.
std::string trajectory_svg(const PredictionInstance & instance, const Prediction & prediction);

/// k lines of k comma-separated mask values; line r is grid row r.
std::string mask_csv(const Tensor<float> & mask);

/// Heat map of a (k, k) mask with y up and the center cell outlined.
std::string mask_svg(const Tensor<float> & mask);

}  // namespace socialmask::cli

#endif  // SOCIALMASK__CLI__PLOTS_HPP_
