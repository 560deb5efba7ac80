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

#ifndef SOCIALMASK__CORE__TENSOR_HPP_
#define SOCIALMASK__CORE__TENSOR_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace socialmask
{

using Shape = std::vector<std::size_t>;

/// Thrown whenever operand shapes do not satisfy an operation's contract.
class ShapeError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

std::size_t shape_numel(const Shape & shape);
std::string format_shape(const Shape & shape);

/**
 * @brief Dense row-major array of scalars.
 *
 * The element count always equals the product of the shape; a rank-0 tensor
 * holds exactly one value.
 */
template <typename T>
class Tensor
{
public:
  using value_type = T;

  Tensor() : data_(1, T{0}) {}
  explicit Tensor(Shape shape, T fill = T{0});
  Tensor(Shape shape, std::vector<T> data);

  static Tensor scalar(T value) { return Tensor(Shape{}, std::vector<T>{value}); }
  static Tensor vector(std::vector<T> values)
  {
    const std::size_t n = values.size();
    return Tensor(Shape{n}, std::move(values));
  }

  const Shape & shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return data_.size(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  const std::vector<T> & values() const { return data_; }

  T & operator[](std::size_t i) { return data_[i]; }
  const T & operator[](std::size_t i) const { return data_[i]; }

  T & at(std::initializer_list<std::size_t> index);
  const T & at(std::initializer_list<std::size_t> index) const;

  /// Value of a single-element tensor.
  T item() const;

  Tensor reshaped(Shape shape) const;

  template <typename U>
  Tensor<U> cast() const
  {
    std::vector<U> out(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
      out[i] = static_cast<U>(data_[i]);
    }
    return Tensor<U>(shape_, std::move(out));
  }

  bool all_finite() const;
  void fill(T value);

  /// Element-wise equality with identical shape (NaN never compares equal).
  bool operator==(const Tensor & other) const = default;

private:
  std::size_t offset(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<T> data_;
};

/// True when both tensors have the same shape and identical bit patterns.
template <typename T>
bool bit_identical(const Tensor<T> & a, const Tensor<T> & b);

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace socialmask

#endif  // SOCIALMASK__CORE__TENSOR_HPP_
