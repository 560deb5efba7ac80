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

#ifndef SOCIALMASK__MODEL__DECODER_HPP_
#define SOCIALMASK__MODEL__DECODER_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "socialmask/core/graph.hpp"
#include "socialmask/core/param_store.hpp"
#include "socialmask/core/rng.hpp"
#include "socialmask/core/tensor.hpp"
#include "socialmask/scene/types.hpp"

namespace socialmask
{

enum class HeadKind {
  L2,        ///< (x, y, z) per step
  Gaussian,  ///< (mu_x, mu_y, s_x, s_y, r, z) per step
};

std::string_view to_string(HeadKind kind);
std::optional<HeadKind> parse_head_kind(std::string_view name);
std::size_t head_width(HeadKind kind);

struct DecoderConfig
{
  std::size_t hidden = 40;
  HeadKind head = HeadKind::L2;
  /// Step inputs are divided by this before entering the LSTM.
  double input_scale = 1.0;
  /// Head outputs are multiplied by this (meters per unit).
  double displacement_scale = 1.0;
  /// When set, each step's position is the previous position plus the
  /// scaled head output; otherwise the scaled head output itself.
  bool residual = true;
  /// Weight of the squared z error in the Gaussian loss.
  double lambda_z = 1.0;
};

/// Registers "decoder.lstm.*" and the configured head ("decoder.head_l2.*"
/// or "decoder.head_gauss.*").
void init_decoder_params(ParamStore<float> & params, const DecoderConfig & config, Rng & rng);

struct DecodeOutput
{
  std::vector<Var> points;  // t_f entries of (3)
  std::vector<Var> gauss;   // Gaussian head only: t_f entries of (6)
};

/**
 * Unrolls the decoder for `horizon` steps. The LSTM starts from hidden =
 * `fused`, cell = 0; the first input is `last_observed` and later inputs are
 * the teacher positions when given (training) or the previous predicted
 * point (inference). Gaussian entries hold (mu_x, mu_y, s_x, s_y, r, z) with
 * sigma = exp(s) and rho = tanh(r).
 */
template <typename T>
DecodeOutput decode(
  Graph<T> & g, Var fused, std::size_t horizon, const Vec3 & last_observed, const DecoderConfig & config,
  const std::vector<Vec3> * teacher = nullptr);

struct GaussianParams
{
  double mu_x = 0.0;
  double mu_y = 0.0;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double rho = 0.0;
  double z = 0.0;
};

/// Applies sigma = exp(s), rho = tanh(r) to a raw 6-vector.
GaussianParams gaussian_from_raw(std::span<const float> raw);

/// Negative log-likelihood of one step: -log N2((x, y) | mu, sigma, rho)
/// + lambda_z (z_gt - z)^2. Throws std::domain_error when not finite.
double gaussian_nll_step(const GaussianParams & p, const Vec3 & gt, double lambda_z);

/// Mean over steps of gaussian_nll_step for raw (t_f, 6) rows.
double gaussian_nll(const Tensor<float> & raw, const std::vector<Vec3> & gt, double lambda_z);

/// Mean over steps of the squared Euclidean error; pred is (t_f, 3).
double l2_loss(const Tensor<float> & pred, const std::vector<Vec3> & gt);

/// (mu_x, mu_y, z) of each raw (t_f, 6) row as (t_f, 3).
Tensor<float> point_estimate(const Tensor<float> & raw);

namespace ops
{

/// Scalar mean over steps of |point_t - gt_t|^2.
template <typename T>
Var l2_loss(Graph<T> & g, const std::vector<Var> & points, const std::vector<Vec3> & gt);

/// Scalar mean over steps of the Gaussian step NLL.
template <typename T>
Var gaussian_nll(Graph<T> & g, const std::vector<Var> & gauss, const std::vector<Vec3> & gt, T lambda_z);

}  // namespace ops
}  // namespace socialmask

#endif  // SOCIALMASK__MODEL__DECODER_HPP_
