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

#include "socialmask/core/param_store.hpp"

#include <stdexcept>

namespace socialmask
{

template <typename T>
void ParamStore<T>::add(const std::string & name, Tensor<T> value)
{
  if (name.empty()) {
    throw std::invalid_argument("parameter name must not be empty");
  }
  if (contains(name)) {
    throw std::invalid_argument("duplicate parameter '" + name + "'");
  }
  grads_.emplace(name, Tensor<T>(value.shape()));
  values_.emplace(name, std::move(value));
}

template <typename T>
std::size_t ParamStore<T>::scalar_count() const
{
  std::size_t n = 0;
  for (const auto & [name, value] : values_) {
    n += value.size();
  }
  return n;
}

template <typename T>
std::vector<std::string> ParamStore<T>::names() const
{
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto & [name, value] : values_) {
    out.push_back(name);
  }
  return out;
}

template <typename T>
const Tensor<T> & ParamStore<T>::value(const std::string & name) const
{
  const auto it = values_.find(name);
  if (it == values_.end()) {
    throw std::out_of_range("unknown parameter '" + name + "'");
  }
  return it->second;
}

template <typename T>
Tensor<T> & ParamStore<T>::mutable_value(const std::string & name)
{
  const auto it = values_.find(name);
  if (it == values_.end()) {
    throw std::out_of_range("unknown parameter '" + name + "'");
  }
  return it->second;
}

template <typename T>
const Tensor<T> & ParamStore<T>::grad(const std::string & name) const
{
  const auto it = grads_.find(name);
  if (it == grads_.end()) {
    throw std::out_of_range("no gradient for parameter '" + name + "'");
  }
  return it->second;
}

template <typename T>
Tensor<T> & ParamStore<T>::mutable_grad(const std::string & name)
{
  const auto it = grads_.find(name);
  if (it == grads_.end()) {
    throw std::out_of_range("no gradient for parameter '" + name + "'");
  }
  return it->second;
}

template <typename T>
void ParamStore<T>::zero_grad()
{
  for (auto & [name, grad] : grads_) {
    grad.fill(T{0});
  }
}

template <typename T>
TensorMap<T> ParamStore<T>::zeros_like() const
{
  TensorMap<T> out;
  for (const auto & [name, value] : values_) {
    out.emplace(name, Tensor<T>(value.shape()));
  }
  return out;
}

template class ParamStore<float>;
template class ParamStore<double>;

}  // namespace socialmask
