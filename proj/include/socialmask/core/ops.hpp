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

#ifndef SOCIALMASK__CORE__OPS_HPP_
#define SOCIALMASK__CORE__OPS_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "socialmask/core/graph.hpp"
#include "socialmask/core/tensor.hpp"

namespace socialmask
{

// ---------------------------------------------------------------------------
// Plain forward kernels
// ---------------------------------------------------------------------------

/// Gate weights for a single LSTM cell. Gate order along the 4H axis is
/// input, forget, candidate, output.
template <typename T>
struct LstmWeights
{
  Tensor<T> input_weight;      // (4H, I)
  Tensor<T> recurrent_weight;  // (4H, H)
  Tensor<T> bias;              // (4H)
};

template <typename T>
struct LstmState
{
  Tensor<T> hidden;
  Tensor<T> cell;
};

template <typename T>
LstmState<T> lstm_cell_step(
  const Tensor<T> & x, const Tensor<T> & h, const Tensor<T> & c, const LstmWeights<T> & weights);

struct Conv2dSpec
{
  std::size_t stride = 1;
  std::size_t padding = 0;
};

/// Cross-correlation of an (H, W, Cin) input with a (Kh, Kw, Cin, Cout) kernel.
template <typename T>
Tensor<T> conv2d(const Tensor<T> & input, const Tensor<T> & kernel, const Tensor<T> & bias, Conv2dSpec spec);

/// Per-channel max over kernel x kernel windows of an (H, W, C) input.
template <typename T>
Tensor<T> maxpool2d(const Tensor<T> & input, std::size_t kernel, std::size_t stride);

/// Softmax over all elements, computed with max subtraction.
template <typename T>
Tensor<T> softmax(const Tensor<T> & logits);

/// y = W x + b with W of shape (out, in).
template <typename T>
Tensor<T> dense(const Tensor<T> & x, const Tensor<T> & weight, const Tensor<T> & bias);

Shape conv2d_output_shape(const Shape & input, const Shape & kernel, Conv2dSpec spec);
Shape maxpool2d_output_shape(const Shape & input, std::size_t kernel, std::size_t stride);

// ---------------------------------------------------------------------------
// Differentiable ops recorded on a Graph
// ---------------------------------------------------------------------------
namespace ops
{

template <typename T>
Var add(Graph<T> & g, Var a, Var b);
template <typename T>
Var sub(Graph<T> & g, Var a, Var b);
/// Element-wise product of equal-shaped operands.
template <typename T>
Var mul(Graph<T> & g, Var a, Var b);
template <typename T>
Var scale(Graph<T> & g, Var a, T factor);
/// Sum of all elements, as a scalar.
template <typename T>
Var sum(Graph<T> & g, Var a);

/// Flattens and concatenates the operands into a vector.
template <typename T>
Var concat(Graph<T> & g, const std::vector<Var> & parts);
/// Contiguous flat range [offset, offset + length) as a vector.
template <typename T>
Var slice(Graph<T> & g, Var a, std::size_t offset, std::size_t length);
template <typename T>
Var reshape(Graph<T> & g, Var a, Shape shape);

template <typename T>
Var relu(Graph<T> & g, Var a);
template <typename T>
Var softmax(Graph<T> & g, Var logits);

template <typename T>
Var dense(Graph<T> & g, Var x, Var weight, Var bias);

/// One LSTM step on a packed state vector [h; c] of length 2H.
/// Returns the packed next state.
template <typename T>
Var lstm_step(Graph<T> & g, Var x, Var state, Var input_weight, Var recurrent_weight, Var bias);

template <typename T>
Var conv2d(Graph<T> & g, Var input, Var kernel, Var bias, Conv2dSpec spec);
template <typename T>
Var maxpool2d(Graph<T> & g, Var input, std::size_t kernel, std::size_t stride);

/// Multiplies every channel of an (H, W, C) map by an (H, W) weight grid.
template <typename T>
Var scale_channels(Graph<T> & g, Var map, Var weights);

/// Writes each C-vector in `items` into cell (row, col) of a zero (k, k, C)
/// grid. Cells must be distinct.
template <typename T>
Var scatter_cells(
  Graph<T> & g, const std::vector<Var> & items, const std::vector<std::pair<std::size_t, std::size_t>> & cells,
  std::size_t k);

/// Sums an (H, W, C) map over its spatial axes, giving a C-vector.
template <typename T>
Var sum_cells(Graph<T> & g, Var map);

}  // namespace ops
}  // namespace socialmask

#endif  // SOCIALMASK__CORE__OPS_HPP_
