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

#include "socialmask/core/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace socialmask
{

template <typename T>
void Adam<T>::step(ParamStore<T> & params, double lr, std::int64_t step)
{
  if (step < 1) {
    throw std::invalid_argument("adam step index must be >= 1, got " + std::to_string(step));
  }
  // Validate everything before touching any state so a rejected call is a no-op.
  for (const auto & [name, value] : params.values()) {
    const auto it = params.grads().find(name);
    if (it == params.grads().end() || it->second.shape() != value.shape()) {
      throw std::invalid_argument("missing or mis-shaped gradient for parameter '" + name + "'");
    }
  }

  const T b1 = static_cast<T>(config_.beta1);
  const T b2 = static_cast<T>(config_.beta2);
  const T eps = static_cast<T>(config_.epsilon);
  const T correction1 = static_cast<T>(1.0 - std::pow(config_.beta1, static_cast<double>(step)));
  const T correction2 = static_cast<T>(1.0 - std::pow(config_.beta2, static_cast<double>(step)));
  const T rate = static_cast<T>(lr);

  for (const auto & name : params.names()) {
    auto & value = params.mutable_value(name);
    const auto & grad = params.grad(name);
    auto [m_it, m_new] = m_.try_emplace(name, Tensor<T>(value.shape()));
    auto [v_it, v_new] = v_.try_emplace(name, Tensor<T>(value.shape()));
    auto & m = m_it->second;
    auto & v = v_it->second;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const T g = grad[i];
      m[i] = b1 * m[i] + (T{1} - b1) * g;
      v[i] = b2 * v[i] + (T{1} - b2) * g * g;
      const T m_hat = m[i] / correction1;
      const T v_hat = v[i] / correction2;
      value[i] -= rate * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace socialmask
