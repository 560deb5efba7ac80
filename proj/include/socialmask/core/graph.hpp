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

#ifndef SOCIALMASK__CORE__GRAPH_HPP_
#define SOCIALMASK__CORE__GRAPH_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "socialmask/core/param_store.hpp"
#include "socialmask/core/tensor.hpp"

namespace socialmask
{

/// Handle to a node recorded on a Graph.
struct Var
{
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
};

/**
 * @brief Reverse-mode tape.
 *
 * Nodes are appended in evaluation order, so the tape itself is a
 * topological order and backward() is a single reverse sweep. Parameter
 * leaves borrow their value from the ParamStore given at construction; the
 * store must outlive the graph and must not be mutated while it is alive.
 */
template <typename T>
class Graph
{
public:
  /// Called during backward with the id of the node being differentiated.
  using BackwardFn = std::function<void(Graph &, Var self)>;

  Graph() = default;
  explicit Graph(const ParamStore<T> & params) : params_(&params) {}

  Graph(const Graph &) = delete;
  Graph & operator=(const Graph &) = delete;

  /// Leaf that never receives a gradient.
  Var constant(Tensor<T> value);
  /// Leaf bound to a named parameter. Repeated calls return the same node.
  Var param(const std::string & name);

  /// Appends an op node. `backward` may be empty for ops with no inputs
  /// requiring gradients.
  Var record(Tensor<T> value, std::vector<Var> parents, BackwardFn backward);

  const Tensor<T> & value(Var v) const;
  const Shape & shape(Var v) const { return value(v).shape(); }

  /// Gradient flowing into `v` during backward (zeros if nothing arrived).
  const Tensor<T> & grad(Var v) const;
  /// Accumulation buffer for a parent's gradient, or nullptr when that
  /// parent does not require one.
  Tensor<T> * grad_sink(Var v);

  bool requires_grad(Var v) const;
  std::size_t node_count() const { return nodes_.size(); }

  /**
   * Back-propagates from a scalar `loss`, adding `seed * dloss/dparam` into
   * `sink[name]` for every parameter leaf. Parameters off the path to the
   * loss receive nothing. A graph can be swept only once.
   */
  void backward(Var loss, TensorMap<T> & sink, T seed = T{1});
  /// As above, accumulating into the gradients held by `params`.
  void backward(Var loss, ParamStore<T> & params, T seed = T{1});

private:
  struct Node
  {
    Tensor<T> value;
    const Tensor<T> * borrowed = nullptr;
    Tensor<T> grad;
    bool has_grad = false;
    bool requires_grad = false;
    std::vector<Var> parents;
    BackwardFn backward;
    std::string param_name;
  };

  const Node & node(Var v) const;
  Node & node(Var v);

  const ParamStore<T> * params_ = nullptr;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, Var> param_index_;
  bool swept_ = false;
};

extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace socialmask

#endif  // SOCIALMASK__CORE__GRAPH_HPP_
