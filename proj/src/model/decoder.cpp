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

#include "socialmask/model/decoder.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "socialmask/core/ops.hpp"

namespace socialmask
{

std::string_view to_string(HeadKind kind)
{
  return kind == HeadKind::L2 ? "l2" : "gauss";
}

std::optional<HeadKind> parse_head_kind(std::string_view name)
{
  if (name == "l2") {
    return HeadKind::L2;
  }
  if (name == "gauss" || name == "gaussian") {
    return HeadKind::Gaussian;
  }
  return std::nullopt;
}

std::size_t head_width(HeadKind kind)
{
  return kind == HeadKind::L2 ? 3 : 6;
}

namespace
{

const char * head_prefix(HeadKind kind)
{
  return kind == HeadKind::L2 ? "decoder.head_l2" : "decoder.head_gauss";
}

Tensor<float> uniform_tensor(Rng & rng, Shape shape, double bound)
{
  Tensor<float> t(std::move(shape));
  for (auto & v : t.data()) {
    v = static_cast<float>(rng.uniform(-bound, bound));
  }
  return t;
}

template <typename T>
Tensor<T> vec3(const Vec3 & p)
{
  return Tensor<T>(Shape{3}, std::vector<T>{static_cast<T>(p.x), static_cast<T>(p.y), static_cast<T>(p.z)});
}

/// NLL terms shared by the value and graph versions. `a`, `b` are the
/// standardized errors.
struct NllParts
{
  double a, b, one_minus_rho2, quad, value;
};

NllParts nll_parts(double mu_x, double mu_y, double s_x, double s_y, double rho, double z, const Vec3 & gt,
                   double lambda_z)
{
  NllParts p{};
  p.a = (gt.x - mu_x) * std::exp(-s_x);
  p.b = (gt.y - mu_y) * std::exp(-s_y);
  p.one_minus_rho2 = 1.0 - rho * rho;
  p.quad = p.a * p.a + p.b * p.b - 2.0 * rho * p.a * p.b;
  const double dz = gt.z - z;
  p.value = std::log(2.0 * std::numbers::pi) + s_x + s_y + 0.5 * std::log(p.one_minus_rho2) +
            p.quad / (2.0 * p.one_minus_rho2) + lambda_z * dz * dz;
  return p;
}

}  // namespace

void init_decoder_params(ParamStore<float> & params, const DecoderConfig & config, Rng & rng)
{
  const std::size_t H = config.hidden;
  const double bound = 1.0 / std::sqrt(static_cast<double>(H));
  params.add("decoder.lstm.input_weight", uniform_tensor(rng, Shape{4 * H, 3}, bound));
  params.add("decoder.lstm.recurrent_weight", uniform_tensor(rng, Shape{4 * H, H}, bound));
  params.add("decoder.lstm.bias", Tensor<float>(Shape{4 * H}));
  const std::string head = head_prefix(config.head);
  params.add(head + ".weight", uniform_tensor(rng, Shape{head_width(config.head), H}, bound));
  params.add(head + ".bias", Tensor<float>(Shape{head_width(config.head)}));
}

template <typename T>
DecodeOutput decode(
  Graph<T> & g, Var fused, std::size_t horizon, const Vec3 & last_observed, const DecoderConfig & config,
  const std::vector<Vec3> * teacher)
{
  const std::size_t H = config.hidden;
  if (horizon < 1) {
    throw std::invalid_argument("decode: horizon must be at least 1");
  }
  if (g.shape(fused) != Shape{H}) {
    throw ShapeError("decode: fused representation must be (" + std::to_string(H) + "), got " +
                     format_shape(g.shape(fused)));
  }
  if (teacher != nullptr && teacher->size() != horizon) {
    throw std::invalid_argument("decode: teacher has " + std::to_string(teacher->size()) + " steps, expected " +
                                std::to_string(horizon));
  }
  const Var w_ih = g.param("decoder.lstm.input_weight");
  const Var w_hh = g.param("decoder.lstm.recurrent_weight");
  const Var b = g.param("decoder.lstm.bias");
  const std::string head = head_prefix(config.head);
  const Var hw = g.param(head + ".weight");
  const Var hb = g.param(head + ".bias");
  const T in_scale = static_cast<T>(1.0 / config.input_scale);
  const T out_scale = static_cast<T>(config.displacement_scale);

  DecodeOutput out;
  Var state = ops::concat(g, {fused, g.constant(Tensor<T>(Shape{H}))});
  Var prev = g.constant(vec3<T>(last_observed));
  for (std::size_t t = 0; t < horizon; ++t) {
    state = ops::lstm_step(g, ops::scale(g, prev, in_scale), state, w_ih, w_hh, b);
    const Var raw = ops::dense(g, ops::slice(g, state, 0, H), hw, hb);
    Var delta;
    if (config.head == HeadKind::L2) {
      delta = raw;
    } else {
      delta = ops::concat(g, {ops::slice(g, raw, 0, 2), ops::slice(g, raw, 5, 1)});
    }
    delta = ops::scale(g, delta, out_scale);
    const Var point = config.residual ? ops::add(g, prev, delta) : delta;
    out.points.push_back(point);
    if (config.head == HeadKind::Gaussian) {
      out.gauss.push_back(
        ops::concat(g, {ops::slice(g, point, 0, 2), ops::slice(g, raw, 2, 3), ops::slice(g, point, 2, 1)}));
    }
    prev = teacher != nullptr ? g.constant(vec3<T>((*teacher)[t])) : point;
  }
  return out;
}

GaussianParams gaussian_from_raw(std::span<const float> raw)
{
  if (raw.size() != 6) {
    throw ShapeError("gaussian_from_raw: expected 6 values, got " + std::to_string(raw.size()));
  }
  return {raw[0], raw[1], std::exp(static_cast<double>(raw[2])), std::exp(static_cast<double>(raw[3])),
          std::tanh(static_cast<double>(raw[4])), raw[5]};
}

double gaussian_nll_step(const GaussianParams & p, const Vec3 & gt, double lambda_z)
{
  if (!(p.sigma_x > 0.0 && p.sigma_y > 0.0 && std::abs(p.rho) < 1.0)) {
    throw std::domain_error("gaussian_nll_step: need sigma > 0 and |rho| < 1");
  }
  const double v =
    nll_parts(p.mu_x, p.mu_y, std::log(p.sigma_x), std::log(p.sigma_y), p.rho, p.z, gt, lambda_z).value;
  if (!std::isfinite(v)) {
    throw std::domain_error("gaussian_nll_step: non-finite density");
  }
  return v;
}

double gaussian_nll(const Tensor<float> & raw, const std::vector<Vec3> & gt, double lambda_z)
{
  if (raw.rank() != 2 || raw.dim(1) != 6 || raw.dim(0) != gt.size() || gt.empty()) {
    throw ShapeError("gaussian_nll: params " + format_shape(raw.shape()) + " vs " + std::to_string(gt.size()) +
                     " ground-truth steps");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    try {
      total += gaussian_nll_step(gaussian_from_raw(raw.data().subspan(t * 6, 6)), gt[t], lambda_z);
    } catch (const std::domain_error & e) {
      throw std::domain_error("gaussian_nll: step " + std::to_string(t) + ": " + e.what());
    }
  }
  return total / static_cast<double>(gt.size());
}

double l2_loss(const Tensor<float> & pred, const std::vector<Vec3> & gt)
{
  if (pred.rank() != 2 || pred.dim(1) != 3 || pred.dim(0) != gt.size() || gt.empty()) {
    throw ShapeError("l2_loss: prediction " + format_shape(pred.shape()) + " vs " + std::to_string(gt.size()) +
                     " ground-truth steps");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    const double dx = pred[t * 3] - gt[t].x;
    const double dy = pred[t * 3 + 1] - gt[t].y;
    const double dz = pred[t * 3 + 2] - gt[t].z;
    total += dx * dx + dy * dy + dz * dz;
  }
  return total / static_cast<double>(gt.size());
}

Tensor<float> point_estimate(const Tensor<float> & raw)
{
  if (raw.rank() != 2 || raw.dim(1) != 6) {
    throw ShapeError("point_estimate: expected (t_f, 6), got " + format_shape(raw.shape()));
  }
  const std::size_t n = raw.dim(0);
  Tensor<float> out(Shape{n, 3});
  for (std::size_t t = 0; t < n; ++t) {
    out[t * 3] = raw[t * 6];
    out[t * 3 + 1] = raw[t * 6 + 1];
    out[t * 3 + 2] = raw[t * 6 + 5];
  }
  return out;
}

namespace ops
{

template <typename T>
Var l2_loss(Graph<T> & g, const std::vector<Var> & points, const std::vector<Vec3> & gt)
{
  if (points.size() != gt.size() || gt.empty()) {
    throw ShapeError("l2_loss: " + std::to_string(points.size()) + " predicted steps vs " +
                     std::to_string(gt.size()) + " ground-truth steps");
  }
  std::vector<Var> terms;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    const Var e = sub(g, points[t], g.constant(vec3<T>(gt[t])));
    terms.push_back(sum(g, mul(g, e, e)));
  }
  Var total = terms[0];
  for (std::size_t t = 1; t < terms.size(); ++t) {
    total = add(g, total, terms[t]);
  }
  return scale(g, total, T{1} / static_cast<T>(gt.size()));
}

template <typename T>
Var gaussian_nll(Graph<T> & g, const std::vector<Var> & gauss, const std::vector<Vec3> & gt, T lambda_z)
{
  if (gauss.size() != gt.size() || gt.empty()) {
    throw ShapeError("gaussian_nll: " + std::to_string(gauss.size()) + " predicted steps vs " +
                     std::to_string(gt.size()) + " ground-truth steps");
  }
  const T inv_n = T{1} / static_cast<T>(gt.size());
  std::vector<Var> steps;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    const Var p = gauss[t];
    const auto & v = g.value(p);
    if (v.size() != 6) {
      throw ShapeError("gaussian_nll: step params must have 6 values, got " + format_shape(v.shape()));
    }
    const Vec3 target = gt[t];
    const double rho = std::tanh(static_cast<double>(v[4]));
    const NllParts parts = nll_parts(v[0], v[1], v[2], v[3], rho, v[5], target, static_cast<double>(lambda_z));
    if (!std::isfinite(parts.value)) {
      throw std::domain_error("gaussian_nll: non-finite density at step " + std::to_string(t));
    }
    steps.push_back(g.record(
      Tensor<T>::scalar(static_cast<T>(parts.value)), {p}, [p, target, lambda_z](Graph<T> & gr, Var self) {
        auto * dp = gr.grad_sink(p);
        if (dp == nullptr) {
          return;
        }
        const auto & v = gr.value(p);
        const double up = static_cast<double>(gr.grad(self)[0]);
        const double rho = std::tanh(static_cast<double>(v[4]));
        const NllParts q = nll_parts(v[0], v[1], v[2], v[3], rho, v[5], target, static_cast<double>(lambda_z));
        const double om = q.one_minus_rho2;
        const double sx = std::exp(-static_cast<double>(v[2]));
        const double sy = std::exp(-static_cast<double>(v[3]));
        const double grads[6] = {
          (rho * q.b - q.a) * sx / om,
          (rho * q.a - q.b) * sy / om,
          1.0 - (q.a * q.a - rho * q.a * q.b) / om,
          1.0 - (q.b * q.b - rho * q.a * q.b) / om,
          -rho - q.a * q.b + q.quad * rho / om,
          -2.0 * static_cast<double>(lambda_z) * (target.z - static_cast<double>(v[5])),
        };
        for (std::size_t i = 0; i < 6; ++i) {
          (*dp)[i] += static_cast<T>(up * grads[i]);
        }
      }));
  }
  Var total = steps[0];
  for (std::size_t t = 1; t < steps.size(); ++t) {
    total = add(g, total, steps[t]);
  }
  return scale(g, total, inv_n);
}

}  // namespace ops

#define SOCIALMASK_INSTANTIATE_DECODER(T)                                                                   \
  template DecodeOutput decode<T>(Graph<T> &, Var, std::size_t, const Vec3 &, const DecoderConfig &,       \
                                  const std::vector<Vec3> *);                                               \
  template Var ops::l2_loss<T>(Graph<T> &, const std::vector<Var> &, const std::vector<Vec3> &);           \
  template Var ops::gaussian_nll<T>(Graph<T> &, const std::vector<Var> &, const std::vector<Vec3> &, T);

SOCIALMASK_INSTANTIATE_DECODER(float)
SOCIALMASK_INSTANTIATE_DECODER(double)

}  // namespace socialmask
