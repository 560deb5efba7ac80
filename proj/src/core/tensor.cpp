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

#include "socialmask/core/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace socialmask
{

std::size_t shape_numel(const Shape & shape)
{
  std::size_t n = 1;
  for (const auto d : shape) {
    n *= d;
  }
  return n;
}

std::string format_shape(const Shape & shape)
{
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) {
      out += ", ";
    }
    out += std::to_string(shape[i]);
  }
  if (shape.size() == 1) {
    out += ",";
  }
  out += ")";
  return out;
}

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill) : shape_(std::move(shape)), data_(shape_numel(shape_), fill)
{
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data))
{
  if (shape_numel(shape_) != data_.size()) {
    throw ShapeError(
      "tensor shape " + format_shape(shape_) + " needs " + std::to_string(shape_numel(shape_)) +
      " values, got " + std::to_string(data_.size()));
  }
}

template <typename T>
std::size_t Tensor<T>::dim(std::size_t axis) const
{
  if (axis >= shape_.size()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + format_shape(shape_));
  }
  return shape_[axis];
}

template <typename T>
std::size_t Tensor<T>::offset(std::initializer_list<std::size_t> index) const
{
  if (index.size() != shape_.size()) {
    throw ShapeError("index rank does not match tensor shape " + format_shape(shape_));
  }
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (const auto i : index) {
    if (i >= shape_[axis]) {
      throw std::out_of_range("index out of range for shape " + format_shape(shape_));
    }
    flat = flat * shape_[axis] + i;
    ++axis;
  }
  return flat;
}

template <typename T>
T & Tensor<T>::at(std::initializer_list<std::size_t> index)
{
  return data_[offset(index)];
}

template <typename T>
const T & Tensor<T>::at(std::initializer_list<std::size_t> index) const
{
  return data_[offset(index)];
}

template <typename T>
T Tensor<T>::item() const
{
  if (data_.size() != 1) {
    throw ShapeError("item() needs a single-element tensor, got shape " + format_shape(shape_));
  }
  return data_[0];
}

template <typename T>
Tensor<T> Tensor<T>::reshaped(Shape shape) const
{
  if (shape_numel(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + format_shape(shape_) + " to " + format_shape(shape));
  }
  return Tensor(std::move(shape), data_);
}

template <typename T>
bool Tensor<T>::all_finite() const
{
  return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
}

template <typename T>
void Tensor<T>::fill(T value)
{
  std::fill(data_.begin(), data_.end(), value);
}

template <typename T>
bool bit_identical(const Tensor<T> & a, const Tensor<T> & b)
{
  return a.shape() == b.shape() &&
         std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(T)) == 0;
}

template class Tensor<float>;
template class Tensor<double>;
template bool bit_identical(const Tensor<float> &, const Tensor<float> &);
template bool bit_identical(const Tensor<double> &, const Tensor<double> &);

}  // namespace socialmask
