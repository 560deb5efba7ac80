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

// Central finite-difference oracle. It only ever evaluates forward passes;
// reverse-mode results are compared against it, never used by it.

#ifndef SOCIALMASK__TESTS__GRADCHECK_HPP_
#define SOCIALMASK__TESTS__GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <string>

#include "socialmask/core/graph.hpp"
#include "socialmask/core/param_store.hpp"

namespace socialmask::testing
{

struct GradCheckReport
{
  /// Double-precision reverse mode vs double-precision central differences.
  double max_rel_error_f64 = 0.0;
  /// Float32 reverse mode vs double-precision central differences.
  double max_rel_error_f32 = 0.0;
  std::string worst_f64;
  std::string worst_f32;
  std::size_t entries = 0;
  std::size_t nonzero_entries = 0;
};

/// |a - b| / max(|a|, |b|, floor). The floor only matters for entries whose
/// true gradient is itself near zero.
inline double relative_error(double a, double b, double floor)
{
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

/**
 * Compares reverse-mode gradients of `build(graph)` (a generic callable
 * returning the scalar loss Var) against central differences with step
 * `eps`, perturbing every parameter entry of `params`.
 *
 * The float32 comparison uses an absolute floor of `f32_floor` in the
 * denominator: float32 reverse mode carries ~1e-7 relative rounding in the
 * terms it sums, which dominates for gradients near zero. The float64
 * comparison uses `f64_floor`, which small steps need to raise above the
 * difference quotient's rounding noise.
 */
template <typename Build>
GradCheckReport check_gradients(const ParamStore<float> & params, Build && build, double eps = 1e-3,
                                 double f32_floor = 1e-3, double f64_floor = 1e-10)
{
  GradCheckReport report;

  TensorMap<float> grad32 = params.zeros_like();
  {
    Graph<float> g(params);
    const Var loss = build(g);
    g.backward(loss, grad32);
  }

  ParamStore<double> p64 = params.cast<double>();
  TensorMap<double> grad64 = p64.zeros_like();
  {
    Graph<double> g(p64);
    const Var loss = build(g);
    g.backward(loss, grad64);
  }

  auto eval = [&](ParamStore<double> & p) {
    Graph<double> g(p);
    const Var loss = build(g);
    return g.value(loss).item();
  };

  for (const auto & name : p64.names()) {
    auto & value = p64.mutable_value(name);
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      value[i] = saved + eps;
      const double up = eval(p64);
      value[i] = saved - eps;
      const double down = eval(p64);
      value[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);

      const double a64 = grad64.at(name)[i];
      const double a32 = static_cast<double>(grad32.at(name)[i]);
      ++report.entries;
      if (std::abs(numeric) > 1e-12) {
        ++report.nonzero_entries;
      }
      const double e64 = relative_error(a64, numeric, f64_floor);
      const double e32 = relative_error(a32, numeric, f32_floor);
      if (e64 > report.max_rel_error_f64) {
        report.max_rel_error_f64 = e64;
        report.worst_f64 = name + "[" + std::to_string(i) + "] analytic=" + std::to_string(a64) +
                           " numeric=" + std::to_string(numeric);
      }
      if (e32 > report.max_rel_error_f32) {
        report.max_rel_error_f32 = e32;
        report.worst_f32 = name + "[" + std::to_string(i) + "] analytic=" + std::to_string(a32) +
                           " numeric=" + std::to_string(numeric);
      }
    }
  }
  return report;
}

}  // namespace socialmask::testing

#endif  // SOCIALMASK__TESTS__GRADCHECK_HPP_
