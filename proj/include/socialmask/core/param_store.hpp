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

#ifndef SOCIALMASK__CORE__PARAM_STORE_HPP_
#define SOCIALMASK__CORE__PARAM_STORE_HPP_

#include <map>
#include <string>
#include <vector>

#include "socialmask/core/tensor.hpp"

namespace socialmask
{

/// Name-keyed tensors; std::map keeps iteration lexicographic.
template <typename T>
using TensorMap = std::map<std::string, Tensor<T>>;

/**
 * @brief Learnable parameters keyed by dot-separated path, each paired with
 * a gradient tensor of identical shape.
 */
template <typename T>
class ParamStore
{
public:
  /// Registers a parameter with a zero gradient. Duplicate names are rejected.
  void add(const std::string & name, Tensor<T> value);

  bool contains(const std::string & name) const { return values_.count(name) != 0; }
  std::size_t size() const { return values_.size(); }
  std::size_t scalar_count() const;
  std::vector<std::string> names() const;

  const Tensor<T> & value(const std::string & name) const;
  Tensor<T> & mutable_value(const std::string & name);
  const Tensor<T> & grad(const std::string & name) const;
  Tensor<T> & mutable_grad(const std::string & name);

  const TensorMap<T> & values() const { return values_; }
  const TensorMap<T> & grads() const { return grads_; }
  TensorMap<T> & grads() { return grads_; }

  void zero_grad();

  /// Zero tensors shaped like every parameter, for use as a gradient sink.
  TensorMap<T> zeros_like() const;

  template <typename U>
  ParamStore<U> cast() const
  {
    ParamStore<U> out;
    for (const auto & [name, value] : values_) {
      out.add(name, value.template cast<U>());
    }
    return out;
  }

private:
  TensorMap<T> values_;
  TensorMap<T> grads_;
};

extern template class ParamStore<float>;
extern template class ParamStore<double>;

}  // namespace socialmask

#endif  // SOCIALMASK__CORE__PARAM_STORE_HPP_
