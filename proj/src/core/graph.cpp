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

#include "socialmask/core/graph.hpp"

#include <stdexcept>

namespace socialmask
{

template <typename T>
const typename Graph<T>::Node & Graph<T>::node(Var v) const
{
  if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) {
    throw std::invalid_argument("variable " + std::to_string(v.id) + " was not recorded on this graph");
  }
  return nodes_[static_cast<std::size_t>(v.id)];
}

template <typename T>
typename Graph<T>::Node & Graph<T>::node(Var v)
{
  return const_cast<Node &>(static_cast<const Graph &>(*this).node(v));
}

template <typename T>
Var Graph<T>::constant(Tensor<T> value)
{
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

template <typename T>
Var Graph<T>::param(const std::string & name)
{
  if (const auto it = param_index_.find(name); it != param_index_.end()) {
    return it->second;
  }
  if (params_ == nullptr) {
    throw std::logic_error("graph has no parameter store; cannot bind '" + name + "'");
  }
  Node n;
  n.value = Tensor<T>(Shape{0});
  n.borrowed = &params_->value(name);
  n.requires_grad = true;
  n.param_name = name;
  nodes_.push_back(std::move(n));
  const Var v{static_cast<std::int32_t>(nodes_.size() - 1)};
  param_index_.emplace(name, v);
  return v;
}

template <typename T>
Var Graph<T>::record(Tensor<T> value, std::vector<Var> parents, BackwardFn backward)
{
  Node n;
  n.value = std::move(value);
  for (const auto p : parents) {
    n.requires_grad = n.requires_grad || node(p).requires_grad;
  }
  n.parents = std::move(parents);
  if (n.requires_grad) {
    n.backward = std::move(backward);
  }
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

template <typename T>
const Tensor<T> & Graph<T>::value(Var v) const
{
  const Node & n = node(v);
  return n.borrowed != nullptr ? *n.borrowed : n.value;
}

template <typename T>
const Tensor<T> & Graph<T>::grad(Var v) const
{
  const Node & n = node(v);
  if (!n.has_grad) {
    throw std::logic_error("no gradient has reached variable " + std::to_string(v.id));
  }
  return n.grad;
}

template <typename T>
Tensor<T> * Graph<T>::grad_sink(Var v)
{
  Node & n = node(v);
  if (!n.requires_grad) {
    return nullptr;
  }
  if (!n.has_grad) {
    n.grad = Tensor<T>(value(v).shape());
    n.has_grad = true;
  }
  return &n.grad;
}

template <typename T>
bool Graph<T>::requires_grad(Var v) const
{
  return node(v).requires_grad;
}

template <typename T>
void Graph<T>::backward(Var loss, TensorMap<T> & sink, T seed)
{
  if (nodes_.empty()) {
    throw std::logic_error("backward called on an empty graph (no recorded forward computation)");
  }
  if (swept_) {
    throw std::logic_error("backward already ran on this graph");
  }
  const Node & root = node(loss);
  if (value(loss).size() != 1) {
    throw ShapeError("backward needs a scalar loss, got shape " + format_shape(value(loss).shape()));
  }
  swept_ = true;
  if (!root.requires_grad) {
    return;
  }
  grad_sink(loss)->fill(seed);

  for (std::int32_t id = loss.id; id >= 0; --id) {
    Node & n = nodes_[static_cast<std::size_t>(id)];
    if (!n.has_grad) {
      continue;
    }
    if (n.backward) {
      n.backward(*this, Var{id});
    }
    if (!n.param_name.empty()) {
      auto it = sink.find(n.param_name);
      if (it == sink.end()) {
        it = sink.emplace(n.param_name, Tensor<T>(n.borrowed->shape())).first;
      }
      Tensor<T> & target = it->second;
      if (target.shape() != n.grad.shape()) {
        throw ShapeError("gradient sink for '" + n.param_name + "' has shape " +
                         format_shape(target.shape()));
      }
      for (std::size_t i = 0; i < target.size(); ++i) {
        target[i] += n.grad[i];
      }
    }
  }
}

template <typename T>
void Graph<T>::backward(Var loss, ParamStore<T> & params, T seed)
{
  backward(loss, params.grads(), seed);
}

template class Graph<float>;
template class Graph<double>;

}  // namespace socialmask
