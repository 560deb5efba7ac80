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

#ifndef SOCIALMASK__CORE__ADAM_HPP_
#define SOCIALMASK__CORE__ADAM_HPP_

#include <cstdint>

#include "socialmask/core/param_store.hpp"

namespace socialmask
{

struct AdamConfig
{
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/**
 * @brief Bias-corrected Adam. First and second moments are kept per
 * parameter name and created lazily on the first step that sees them.
 */
template <typename T>
class Adam
{
public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  /// Applies one update using the gradients stored in `params`.
  /// `step` is the 1-based update index used for bias correction.
  void step(ParamStore<T> & params, double lr, std::int64_t step);

  const AdamConfig & config() const { return config_; }
  const TensorMap<T> & first_moments() const { return m_; }
  const TensorMap<T> & second_moments() const { return v_; }

private:
  AdamConfig config_;
  TensorMap<T> m_;
  TensorMap<T> v_;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace socialmask

#endif  // SOCIALMASK__CORE__ADAM_HPP_
