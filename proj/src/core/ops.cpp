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

#include "socialmask/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace socialmask
{
namespace
{

void require(bool ok, const std::string & what)
{
  if (!ok) {
    throw ShapeError(what);
  }
}

template <typename T>
T sigmoid(T x)
{
  return T{1} / (T{1} + std::exp(-x));
}

// ---- LSTM ------------------------------------------------------------------

struct LstmDims
{
  std::size_t input;
  std::size_t hidden;
};

template <typename T>
LstmDims check_lstm(const Tensor<T> & x, std::size_t state_len, const Tensor<T> & w_ih, const Tensor<T> & w_hh,
                    const Tensor<T> & bias, bool packed)
{
  require(w_ih.rank() == 2 && w_hh.rank() == 2 && bias.rank() == 1,
          "lstm weights must be (4H, I), (4H, H) and (4H); got " + format_shape(w_ih.shape()) + ", " +
            format_shape(w_hh.shape()) + ", " + format_shape(bias.shape()));
  const std::size_t hidden = w_hh.dim(1);
  const std::size_t input = w_ih.dim(1);
  require(w_ih.dim(0) == 4 * hidden && w_hh.dim(0) == 4 * hidden && bias.dim(0) == 4 * hidden,
          "lstm weight shapes inconsistent: input weight " + format_shape(w_ih.shape()) + ", recurrent weight " +
            format_shape(w_hh.shape()) + ", bias " + format_shape(bias.shape()));
  require(x.size() == input, "lstm input has " + std::to_string(x.size()) + " values, weights expect " +
                               std::to_string(input) + " (input shape " + format_shape(x.shape()) + ")");
  const std::size_t expected_state = packed ? 2 * hidden : hidden;
  require(state_len == expected_state, "lstm state has " + std::to_string(state_len) + " values, expected " +
                                         std::to_string(expected_state) + " for hidden size " +
                                         std::to_string(hidden));
  return {input, hidden};
}

/// Computes activated gates (i, f, g, o) plus next (h, c).
template <typename T>
void lstm_forward(const T * x, const T * h, const T * c, const Tensor<T> & w_ih, const Tensor<T> & w_hh,
                  const Tensor<T> & bias, LstmDims dims, T * gates, T * h_next, T * c_next, T * tanh_c)
{
  const std::size_t H = dims.hidden;
  const std::size_t I = dims.input;
  for (std::size_t r = 0; r < 4 * H; ++r) {
    T acc = bias[r];
    const T * wi = w_ih.data().data() + r * I;
    for (std::size_t j = 0; j < I; ++j) {
      acc += wi[j] * x[j];
    }
    const T * wh = w_hh.data().data() + r * H;
    for (std::size_t j = 0; j < H; ++j) {
      acc += wh[j] * h[j];
    }
    gates[r] = acc;
  }
  for (std::size_t j = 0; j < H; ++j) {
    const T i = sigmoid(gates[j]);
    const T f = sigmoid(gates[H + j]);
    const T gg = std::tanh(gates[2 * H + j]);
    const T o = sigmoid(gates[3 * H + j]);
    gates[j] = i;
    gates[H + j] = f;
    gates[2 * H + j] = gg;
    gates[3 * H + j] = o;
    const T cn = f * c[j] + i * gg;
    c_next[j] = cn;
    tanh_c[j] = std::tanh(cn);
    h_next[j] = o * tanh_c[j];
  }
}

// ---- conv ------------------------------------------------------------------

struct ConvGeom
{
  std::size_t h, w, cin, kh, kw, cout, oh, ow, stride, pad;
};

ConvGeom conv_geometry(const Shape & input, const Shape & kernel, Conv2dSpec spec)
{
  require(input.size() == 3, "conv2d input must be (H, W, Cin), got " + format_shape(input));
  require(kernel.size() == 4, "conv2d kernel must be (Kh, Kw, Cin, Cout), got " + format_shape(kernel));
  require(spec.stride >= 1, "conv2d stride must be positive");
  require(kernel[2] == input[2], "conv2d kernel expects " + std::to_string(kernel[2]) + " input channels, input " +
                                   format_shape(input) + " has " + std::to_string(input[2]));
  const std::size_t ph = input[0] + 2 * spec.padding;
  const std::size_t pw = input[1] + 2 * spec.padding;
  require(ph >= kernel[0] && pw >= kernel[1], "conv2d kernel " + format_shape(kernel) +
                                                " larger than padded input " + format_shape(input) + " with padding " +
                                                std::to_string(spec.padding));
  ConvGeom g{};
  g.h = input[0];
  g.w = input[1];
  g.cin = input[2];
  g.kh = kernel[0];
  g.kw = kernel[1];
  g.cout = kernel[3];
  g.stride = spec.stride;
  g.pad = spec.padding;
  g.oh = (ph - g.kh) / g.stride + 1;
  g.ow = (pw - g.kw) / g.stride + 1;
  return g;
}

/// Marks input pixels whose channel vector is entirely zero; they contribute
/// nothing to the forward pass or to the kernel gradient.
template <typename T>
std::vector<unsigned char> nonzero_pixels(const Tensor<T> & input, const ConvGeom & g)
{
  std::vector<unsigned char> nz(g.h * g.w, 0);
  for (std::size_t p = 0; p < g.h * g.w; ++p) {
    const T * px = input.data().data() + p * g.cin;
    for (std::size_t ci = 0; ci < g.cin; ++ci) {
      if (px[ci] != T{0}) {
        nz[p] = 1;
        break;
      }
    }
  }
  return nz;
}

template <typename T>
Tensor<T> conv_forward(const Tensor<T> & input, const Tensor<T> & kernel, const Tensor<T> & bias, const ConvGeom & g)
{
  require(bias.size() == g.cout, "conv2d bias has " + std::to_string(bias.size()) + " values, kernel has " +
                                   std::to_string(g.cout) + " output channels");
  Tensor<T> out(Shape{g.oh, g.ow, g.cout});
  const auto nz = nonzero_pixels(input, g);
  const T * in = input.data().data();
  const T * k = kernel.data().data();
  T * o = out.data().data();
  for (std::size_t oy = 0; oy < g.oh; ++oy) {
    for (std::size_t ox = 0; ox < g.ow; ++ox) {
      T * acc = o + (oy * g.ow + ox) * g.cout;
      for (std::size_t co = 0; co < g.cout; ++co) {
        acc[co] = bias[co];
      }
      for (std::size_t ky = 0; ky < g.kh; ++ky) {
        const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - static_cast<std::ptrdiff_t>(g.pad);
        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) {
          continue;
        }
        for (std::size_t kx = 0; kx < g.kw; ++kx) {
          const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - static_cast<std::ptrdiff_t>(g.pad);
          if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.w)) {
            continue;
          }
          const std::size_t pixel = static_cast<std::size_t>(iy) * g.w + static_cast<std::size_t>(ix);
          if (!nz[pixel]) {
            continue;
          }
          const T * px = in + pixel * g.cin;
          const T * kk = k + (ky * g.kw + kx) * g.cin * g.cout;
          for (std::size_t ci = 0; ci < g.cin; ++ci) {
            const T v = px[ci];
            const T * w = kk + ci * g.cout;
            for (std::size_t co = 0; co < g.cout; ++co) {
              acc[co] += v * w[co];
            }
          }
        }
      }
    }
  }
  return out;
}

Shape pool_shape(const Shape & input, std::size_t kernel, std::size_t stride)
{
  require(input.size() == 3, "maxpool2d input must be (H, W, C), got " + format_shape(input));
  require(kernel >= 1 && stride >= 1, "maxpool2d kernel and stride must be positive");
  require(input[0] >= kernel && input[1] >= kernel, "maxpool2d window " + std::to_string(kernel) +
                                                      " exceeds input " + format_shape(input));
  return Shape{(input[0] - kernel) / stride + 1, (input[1] - kernel) / stride + 1, input[2]};
}

/// Forward max pool; `argmax` receives the flat input index of each output.
template <typename T>
Tensor<T> pool_forward(const Tensor<T> & input, std::size_t kernel, std::size_t stride, std::vector<std::size_t> * argmax)
{
  const Shape os = pool_shape(input.shape(), kernel, stride);
  const std::size_t W = input.dim(1);
  const std::size_t C = input.dim(2);
  Tensor<T> out(os);
  if (argmax != nullptr) {
    argmax->assign(out.size(), 0);
  }
  for (std::size_t oy = 0; oy < os[0]; ++oy) {
    for (std::size_t ox = 0; ox < os[1]; ++ox) {
      for (std::size_t c = 0; c < C; ++c) {
        T best = -std::numeric_limits<T>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t ky = 0; ky < kernel; ++ky) {
          for (std::size_t kx = 0; kx < kernel; ++kx) {
            const std::size_t idx = ((oy * stride + ky) * W + (ox * stride + kx)) * C + c;
            // Strict '>' keeps the first maximum in scan order.
            if (input[idx] > best) {
              best = input[idx];
              best_idx = idx;
            }
          }
        }
        const std::size_t o = (oy * os[1] + ox) * C + c;
        out[o] = best;
        if (argmax != nullptr) {
          (*argmax)[o] = best_idx;
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> softmax_forward(const Tensor<T> & logits)
{
  require(logits.size() >= 1, "softmax needs at least one logit");
  if (!logits.all_finite()) {
    throw std::invalid_argument("softmax received non-finite logits");
  }
  Tensor<T> out(logits.shape());
  const T mx = *std::max_element(logits.data().begin(), logits.data().end());
  T total{0};
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    total += out[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] /= total;
  }
  return out;
}

template <typename T>
void check_dense(const Tensor<T> & x, const Tensor<T> & w, const Tensor<T> & b)
{
  require(w.rank() == 2, "dense weight must be (out, in), got " + format_shape(w.shape()));
  require(x.size() == w.dim(1), "dense input has " + std::to_string(x.size()) + " values, weight " +
                                  format_shape(w.shape()) + " expects " + std::to_string(w.dim(1)));
  require(b.size() == w.dim(0), "dense bias " + format_shape(b.shape()) + " does not match weight " +
                                  format_shape(w.shape()));
}

template <typename T>
Tensor<T> dense_forward(const Tensor<T> & x, const Tensor<T> & w, const Tensor<T> & b)
{
  check_dense(x, w, b);
  const std::size_t out_dim = w.dim(0);
  const std::size_t in_dim = w.dim(1);
  Tensor<T> y(Shape{out_dim});
  for (std::size_t r = 0; r < out_dim; ++r) {
    T acc = b[r];
    const T * row = w.data().data() + r * in_dim;
    for (std::size_t j = 0; j < in_dim; ++j) {
      acc += row[j] * x[j];
    }
    y[r] = acc;
  }
  return y;
}

template <typename T>
void require_same_shape(const Graph<T> & g, Var a, Var b, const char * op)
{
  require(g.shape(a) == g.shape(b), std::string(op) + ": shape mismatch " + format_shape(g.shape(a)) + " vs " +
                                      format_shape(g.shape(b)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Plain kernels
// ---------------------------------------------------------------------------

template <typename T>
LstmState<T> lstm_cell_step(
  const Tensor<T> & x, const Tensor<T> & h, const Tensor<T> & c, const LstmWeights<T> & weights)
{
  const LstmDims dims =
    check_lstm(x, h.size(), weights.input_weight, weights.recurrent_weight, weights.bias, false);
  require(c.size() == dims.hidden, "lstm cell state has " + std::to_string(c.size()) + " values, expected " +
                                     std::to_string(dims.hidden));
  std::vector<T> gates(4 * dims.hidden);
  std::vector<T> tanh_c(dims.hidden);
  LstmState<T> next{Tensor<T>(Shape{dims.hidden}), Tensor<T>(Shape{dims.hidden})};
  lstm_forward(x.data().data(), h.data().data(), c.data().data(), weights.input_weight, weights.recurrent_weight,
               weights.bias, dims, gates.data(), next.hidden.data().data(), next.cell.data().data(), tanh_c.data());
  return next;
}

Shape conv2d_output_shape(const Shape & input, const Shape & kernel, Conv2dSpec spec)
{
  const ConvGeom g = conv_geometry(input, kernel, spec);
  return Shape{g.oh, g.ow, g.cout};
}

Shape maxpool2d_output_shape(const Shape & input, std::size_t kernel, std::size_t stride)
{
  return pool_shape(input, kernel, stride);
}

template <typename T>
Tensor<T> conv2d(const Tensor<T> & input, const Tensor<T> & kernel, const Tensor<T> & bias, Conv2dSpec spec)
{
  return conv_forward(input, kernel, bias, conv_geometry(input.shape(), kernel.shape(), spec));
}

template <typename T>
Tensor<T> maxpool2d(const Tensor<T> & input, std::size_t kernel, std::size_t stride)
{
  return pool_forward<T>(input, kernel, stride, nullptr);
}

template <typename T>
Tensor<T> softmax(const Tensor<T> & logits)
{
  return softmax_forward(logits);
}

template <typename T>
Tensor<T> dense(const Tensor<T> & x, const Tensor<T> & weight, const Tensor<T> & bias)
{
  return dense_forward(x, weight, bias);
}

// ---------------------------------------------------------------------------
// Graph ops
// ---------------------------------------------------------------------------
namespace ops
{

template <typename T>
Var add(Graph<T> & g, Var a, Var b)
{
  require_same_shape(g, a, b, "add");
  const auto & av = g.value(a);
  const auto & bv = g.value(b);
  Tensor<T> out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = av[i] + bv[i];
  }
  return g.record(std::move(out), {a, b}, [a, b](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    for (const Var p : {a, b}) {
      if (auto * dp = gr.grad_sink(p)) {
        for (std::size_t i = 0; i < dy.size(); ++i) {
          (*dp)[i] += dy[i];
        }
      }
    }
  });
}

template <typename T>
Var sub(Graph<T> & g, Var a, Var b)
{
  require_same_shape(g, a, b, "sub");
  const auto & av = g.value(a);
  const auto & bv = g.value(b);
  Tensor<T> out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = av[i] - bv[i];
  }
  return g.record(std::move(out), {a, b}, [a, b](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    if (auto * da = gr.grad_sink(a)) {
      for (std::size_t i = 0; i < dy.size(); ++i) {
        (*da)[i] += dy[i];
      }
    }
    if (auto * db = gr.grad_sink(b)) {
      for (std::size_t i = 0; i < dy.size(); ++i) {
        (*db)[i] -= dy[i];
      }
    }
  });
}

template <typename T>
Var mul(Graph<T> & g, Var a, Var b)
{
  require_same_shape(g, a, b, "mul");
  const auto & av = g.value(a);
  const auto & bv = g.value(b);
  Tensor<T> out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = av[i] * bv[i];
  }
  return g.record(std::move(out), {a, b}, [a, b](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    const auto & av2 = gr.value(a);
    const auto & bv2 = gr.value(b);
    if (auto * da = gr.grad_sink(a)) {
      for (std::size_t i = 0; i < dy.size(); ++i) {
        (*da)[i] += dy[i] * bv2[i];
      }
    }
    if (auto * db = gr.grad_sink(b)) {
      for (std::size_t i = 0; i < dy.size(); ++i) {
        (*db)[i] += dy[i] * av2[i];
      }
    }
  });
}

template <typename T>
Var scale(Graph<T> & g, Var a, T factor)
{
  const auto & av = g.value(a);
  Tensor<T> out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = av[i] * factor;
  }
  return g.record(std::move(out), {a}, [a, factor](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    if (auto * da = gr.grad_sink(a)) {
      for (std::size_t i = 0; i < dy.size(); ++i) {
        (*da)[i] += dy[i] * factor;
      }
    }
  });
}

template <typename T>
Var sum(Graph<T> & g, Var a)
{
  T total{0};
  for (const T v : g.value(a).data()) {
    total += v;
  }
  return g.record(Tensor<T>::scalar(total), {a}, [a](Graph<T> & gr, Var self) {
    const T dy = gr.grad(self)[0];
    if (auto * da = gr.grad_sink(a)) {
      for (std::size_t i = 0; i < da->size(); ++i) {
        (*da)[i] += dy;
      }
    }
  });
}

template <typename T>
Var concat(Graph<T> & g, const std::vector<Var> & parts)
{
  std::size_t total = 0;
  for (const Var p : parts) {
    total += g.value(p).size();
  }
  Tensor<T> out(Shape{total});
  std::size_t at = 0;
  for (const Var p : parts) {
    const auto & pv = g.value(p);
    std::copy(pv.data().begin(), pv.data().end(), out.data().begin() + static_cast<std::ptrdiff_t>(at));
    at += pv.size();
  }
  return g.record(std::move(out), parts, [parts](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    std::size_t offset = 0;
    for (const Var p : parts) {
      const std::size_t n = gr.value(p).size();
      if (auto * dp = gr.grad_sink(p)) {
        for (std::size_t i = 0; i < n; ++i) {
          (*dp)[i] += dy[offset + i];
        }
      }
      offset += n;
    }
  });
}

template <typename T>
Var slice(Graph<T> & g, Var a, std::size_t offset, std::size_t length)
{
  const auto & av = g.value(a);
  require(offset + length <= av.size(), "slice [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
                                          ") out of range for " + format_shape(av.shape()));
  std::vector<T> vals(av.data().begin() + static_cast<std::ptrdiff_t>(offset),
                      av.data().begin() + static_cast<std::ptrdiff_t>(offset + length));
  return g.record(Tensor<T>::vector(std::move(vals)), {a}, [a, offset](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    if (auto * da = gr.grad_sink(a)) {
      for (std::size_t i = 0; i < dy.size(); ++i) {
        (*da)[offset + i] += dy[i];
      }
    }
  });
}

template <typename T>
Var reshape(Graph<T> & g, Var a, Shape shape)
{
  Tensor<T> out = g.value(a).reshaped(std::move(shape));
  return g.record(std::move(out), {a}, [a](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    if (auto * da = gr.grad_sink(a)) {
      for (std::size_t i = 0; i < dy.size(); ++i) {
        (*da)[i] += dy[i];
      }
    }
  });
}

template <typename T>
Var relu(Graph<T> & g, Var a)
{
  const auto & av = g.value(a);
  Tensor<T> out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = av[i] > T{0} ? av[i] : T{0};
  }
  return g.record(std::move(out), {a}, [a](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    const auto & x = gr.value(a);
    if (auto * da = gr.grad_sink(a)) {
      for (std::size_t i = 0; i < dy.size(); ++i) {
        if (x[i] > T{0}) {
          (*da)[i] += dy[i];
        }
      }
    }
  });
}

template <typename T>
Var softmax(Graph<T> & g, Var logits)
{
  Tensor<T> out = softmax_forward(g.value(logits));
  return g.record(std::move(out), {logits}, [logits](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    const auto & y = gr.value(self);
    if (auto * dx = gr.grad_sink(logits)) {
      T dot{0};
      for (std::size_t i = 0; i < y.size(); ++i) {
        dot += dy[i] * y[i];
      }
      for (std::size_t i = 0; i < y.size(); ++i) {
        (*dx)[i] += y[i] * (dy[i] - dot);
      }
    }
  });
}

template <typename T>
Var dense(Graph<T> & g, Var x, Var weight, Var bias)
{
  Tensor<T> out = dense_forward(g.value(x), g.value(weight), g.value(bias));
  return g.record(std::move(out), {x, weight, bias}, [x, weight, bias](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    const auto & xv = gr.value(x);
    const auto & wv = gr.value(weight);
    const std::size_t out_dim = wv.dim(0);
    const std::size_t in_dim = wv.dim(1);
    if (auto * db = gr.grad_sink(bias)) {
      for (std::size_t r = 0; r < out_dim; ++r) {
        (*db)[r] += dy[r];
      }
    }
    if (auto * dw = gr.grad_sink(weight)) {
      for (std::size_t r = 0; r < out_dim; ++r) {
        T * row = dw->data().data() + r * in_dim;
        const T d = dy[r];
        for (std::size_t j = 0; j < in_dim; ++j) {
          row[j] += d * xv[j];
        }
      }
    }
    if (auto * dx = gr.grad_sink(x)) {
      for (std::size_t r = 0; r < out_dim; ++r) {
        const T * row = wv.data().data() + r * in_dim;
        const T d = dy[r];
        for (std::size_t j = 0; j < in_dim; ++j) {
          (*dx)[j] += d * row[j];
        }
      }
    }
  });
}

template <typename T>
Var lstm_step(Graph<T> & g, Var x, Var state, Var input_weight, Var recurrent_weight, Var bias)
{
  const auto & xv = g.value(x);
  const auto & sv = g.value(state);
  const LstmDims dims =
    check_lstm(xv, sv.size(), g.value(input_weight), g.value(recurrent_weight), g.value(bias), true);
  const std::size_t H = dims.hidden;
  std::vector<T> gates(4 * H);
  std::vector<T> tanh_c(H);
  Tensor<T> out(Shape{2 * H});
  T * o = out.data().data();
  lstm_forward(xv.data().data(), sv.data().data(), sv.data().data() + H, g.value(input_weight),
               g.value(recurrent_weight), g.value(bias), dims, gates.data(), o, o + H, tanh_c.data());

  return g.record(
    std::move(out), {x, state, input_weight, recurrent_weight, bias},
    [x, state, input_weight, recurrent_weight, bias, dims, gates = std::move(gates),
     tanh_c = std::move(tanh_c)](Graph<T> & gr, Var self) {
      const std::size_t Hd = dims.hidden;
      const std::size_t I = dims.input;
      const auto & dy = gr.grad(self);
      const T * dh = dy.data().data();
      const T * dc_next = dh + Hd;
      const auto & xs = gr.value(x);
      const auto & st = gr.value(state);
      const T * h_prev = st.data().data();
      const T * c_prev = h_prev + Hd;

      std::vector<T> da(4 * Hd);
      std::vector<T> dc_prev(Hd);
      for (std::size_t j = 0; j < Hd; ++j) {
        const T i = gates[j];
        const T f = gates[Hd + j];
        const T gg = gates[2 * Hd + j];
        const T o = gates[3 * Hd + j];
        const T tc = tanh_c[j];
        const T d_o = dh[j] * tc;
        const T dc = dc_next[j] + dh[j] * o * (T{1} - tc * tc);
        da[j] = dc * gg * i * (T{1} - i);
        da[Hd + j] = dc * c_prev[j] * f * (T{1} - f);
        da[2 * Hd + j] = dc * i * (T{1} - gg * gg);
        da[3 * Hd + j] = d_o * o * (T{1} - o);
        dc_prev[j] = dc * f;
      }

      if (auto * db = gr.grad_sink(bias)) {
        for (std::size_t r = 0; r < 4 * Hd; ++r) {
          (*db)[r] += da[r];
        }
      }
      if (auto * dwi = gr.grad_sink(input_weight)) {
        for (std::size_t r = 0; r < 4 * Hd; ++r) {
          T * row = dwi->data().data() + r * I;
          for (std::size_t j = 0; j < I; ++j) {
            row[j] += da[r] * xs[j];
          }
        }
      }
      if (auto * dwh = gr.grad_sink(recurrent_weight)) {
        for (std::size_t r = 0; r < 4 * Hd; ++r) {
          T * row = dwh->data().data() + r * Hd;
          for (std::size_t j = 0; j < Hd; ++j) {
            row[j] += da[r] * h_prev[j];
          }
        }
      }
      if (auto * dx = gr.grad_sink(x)) {
        const auto & wi = gr.value(input_weight);
        for (std::size_t r = 0; r < 4 * Hd; ++r) {
          const T * row = wi.data().data() + r * I;
          for (std::size_t j = 0; j < I; ++j) {
            (*dx)[j] += da[r] * row[j];
          }
        }
      }
      if (auto * ds = gr.grad_sink(state)) {
        const auto & wh = gr.value(recurrent_weight);
        for (std::size_t r = 0; r < 4 * Hd; ++r) {
          const T * row = wh.data().data() + r * Hd;
          for (std::size_t j = 0; j < Hd; ++j) {
            (*ds)[j] += da[r] * row[j];
          }
        }
        for (std::size_t j = 0; j < Hd; ++j) {
          (*ds)[Hd + j] += dc_prev[j];
        }
      }
    });
}

template <typename T>
Var conv2d(Graph<T> & g, Var input, Var kernel, Var bias, Conv2dSpec spec)
{
  const ConvGeom geo = conv_geometry(g.shape(input), g.shape(kernel), spec);
  Tensor<T> out = conv_forward(g.value(input), g.value(kernel), g.value(bias), geo);
  return g.record(std::move(out), {input, kernel, bias}, [input, kernel, bias, geo](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    const auto & in = gr.value(input);
    const auto & kv = gr.value(kernel);
    if (auto * db = gr.grad_sink(bias)) {
      for (std::size_t p = 0; p < geo.oh * geo.ow; ++p) {
        for (std::size_t co = 0; co < geo.cout; ++co) {
          (*db)[co] += dy[p * geo.cout + co];
        }
      }
    }
    auto * dk = gr.grad_sink(kernel);
    auto * dx = gr.grad_sink(input);
    if (dk == nullptr && dx == nullptr) {
      return;
    }
    const auto nz = nonzero_pixels(in, geo);
    for (std::size_t oy = 0; oy < geo.oh; ++oy) {
      for (std::size_t ox = 0; ox < geo.ow; ++ox) {
        const T * d = dy.data().data() + (oy * geo.ow + ox) * geo.cout;
        for (std::size_t ky = 0; ky < geo.kh; ++ky) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * geo.stride + ky) - static_cast<std::ptrdiff_t>(geo.pad);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(geo.h)) {
            continue;
          }
          for (std::size_t kx = 0; kx < geo.kw; ++kx) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * geo.stride + kx) - static_cast<std::ptrdiff_t>(geo.pad);
            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(geo.w)) {
              continue;
            }
            const std::size_t pixel = static_cast<std::size_t>(iy) * geo.w + static_cast<std::size_t>(ix);
            const std::size_t koff = (ky * geo.kw + kx) * geo.cin * geo.cout;
            const T * px = in.data().data() + pixel * geo.cin;
            if (dk != nullptr && nz[pixel]) {
              T * kg = dk->data().data() + koff;
              for (std::size_t ci = 0; ci < geo.cin; ++ci) {
                const T v = px[ci];
                T * row = kg + ci * geo.cout;
                for (std::size_t co = 0; co < geo.cout; ++co) {
                  row[co] += v * d[co];
                }
              }
            }
            if (dx != nullptr) {
              const T * kk = kv.data().data() + koff;
              T * xg = dx->data().data() + pixel * geo.cin;
              for (std::size_t ci = 0; ci < geo.cin; ++ci) {
                const T * row = kk + ci * geo.cout;
                T acc{0};
                for (std::size_t co = 0; co < geo.cout; ++co) {
                  acc += row[co] * d[co];
                }
                xg[ci] += acc;
              }
            }
          }
        }
      }
    }
  });
}

template <typename T>
Var maxpool2d(Graph<T> & g, Var input, std::size_t kernel, std::size_t stride)
{
  std::vector<std::size_t> argmax;
  Tensor<T> out = pool_forward(g.value(input), kernel, stride, &argmax);
  return g.record(std::move(out), {input}, [input, argmax = std::move(argmax)](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    if (auto * dx = gr.grad_sink(input)) {
      for (std::size_t o = 0; o < dy.size(); ++o) {
        (*dx)[argmax[o]] += dy[o];
      }
    }
  });
}

template <typename T>
Var scale_channels(Graph<T> & g, Var map, Var weights)
{
  const auto & mv = g.value(map);
  const auto & wv = g.value(weights);
  require(mv.rank() == 3, "scale_channels map must be (H, W, C), got " + format_shape(mv.shape()));
  require(wv.size() == mv.dim(0) * mv.dim(1), "scale_channels weights " + format_shape(wv.shape()) +
                                                " do not match map " + format_shape(mv.shape()));
  const std::size_t C = mv.dim(2);
  Tensor<T> out(mv.shape());
  for (std::size_t p = 0; p < wv.size(); ++p) {
    for (std::size_t c = 0; c < C; ++c) {
      out[p * C + c] = mv[p * C + c] * wv[p];
    }
  }
  return g.record(std::move(out), {map, weights}, [map, weights, C](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    const auto & m = gr.value(map);
    const auto & w = gr.value(weights);
    if (auto * dm = gr.grad_sink(map)) {
      for (std::size_t p = 0; p < w.size(); ++p) {
        for (std::size_t c = 0; c < C; ++c) {
          (*dm)[p * C + c] += dy[p * C + c] * w[p];
        }
      }
    }
    if (auto * dw = gr.grad_sink(weights)) {
      for (std::size_t p = 0; p < w.size(); ++p) {
        T acc{0};
        for (std::size_t c = 0; c < C; ++c) {
          acc += dy[p * C + c] * m[p * C + c];
        }
        (*dw)[p] += acc;
      }
    }
  });
}

template <typename T>
Var scatter_cells(
  Graph<T> & g, const std::vector<Var> & items, const std::vector<std::pair<std::size_t, std::size_t>> & cells,
  std::size_t k)
{
  require(items.size() == cells.size(), "scatter_cells: " + std::to_string(items.size()) + " items but " +
                                          std::to_string(cells.size()) + " cells");
  require(k >= 1, "scatter_cells: grid size must be positive");
  std::size_t C = 0;
  for (const Var v : items) {
    const std::size_t n = g.value(v).size();
    require(C == 0 || n == C, "scatter_cells: items must share one length");
    C = n;
  }
  if (C == 0) {
    C = 1;
  }
  Tensor<T> out(Shape{k, k, C});
  std::vector<unsigned char> used(k * k, 0);
  std::vector<std::size_t> offsets;
  offsets.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto [row, col] = cells[i];
    if (row >= k || col >= k) {
      throw std::invalid_argument("scatter_cells: cell (" + std::to_string(row) + ", " + std::to_string(col) +
                                  ") outside " + std::to_string(k) + "x" + std::to_string(k) + " grid");
    }
    const std::size_t p = row * k + col;
    if (used[p]) {
      throw std::invalid_argument("scatter_cells: duplicate cell (" + std::to_string(row) + ", " +
                                  std::to_string(col) + ")");
    }
    used[p] = 1;
    const auto & v = g.value(items[i]);
    std::copy(v.data().begin(), v.data().end(), out.data().begin() + static_cast<std::ptrdiff_t>(p * C));
    offsets.push_back(p * C);
  }
  return g.record(std::move(out), items, [items, offsets = std::move(offsets), C](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (auto * di = gr.grad_sink(items[i])) {
        for (std::size_t c = 0; c < C; ++c) {
          (*di)[c] += dy[offsets[i] + c];
        }
      }
    }
  });
}

template <typename T>
Var sum_cells(Graph<T> & g, Var map)
{
  const auto & mv = g.value(map);
  require(mv.rank() == 3, "sum_cells map must be (H, W, C), got " + format_shape(mv.shape()));
  const std::size_t P = mv.dim(0) * mv.dim(1);
  const std::size_t C = mv.dim(2);
  Tensor<T> out(Shape{C});
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t c = 0; c < C; ++c) {
      out[c] += mv[p * C + c];
    }
  }
  return g.record(std::move(out), {map}, [map, P, C](Graph<T> & gr, Var self) {
    const auto & dy = gr.grad(self);
    if (auto * dm = gr.grad_sink(map)) {
      for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t c = 0; c < C; ++c) {
          (*dm)[p * C + c] += dy[c];
        }
      }
    }
  });
}

}  // namespace ops

#define SOCIALMASK_INSTANTIATE_OPS(T)                                                                             \
  template LstmState<T> lstm_cell_step(const Tensor<T> &, const Tensor<T> &, const Tensor<T> &,                  \
                                       const LstmWeights<T> &);                                                  \
  template Tensor<T> conv2d(const Tensor<T> &, const Tensor<T> &, const Tensor<T> &, Conv2dSpec);               \
  template Tensor<T> maxpool2d(const Tensor<T> &, std::size_t, std::size_t);                                     \
  template Tensor<T> softmax(const Tensor<T> &);                                                                 \
  template Tensor<T> dense(const Tensor<T> &, const Tensor<T> &, const Tensor<T> &);                             \
  template Var ops::add(Graph<T> &, Var, Var);                                                                   \
  template Var ops::sub(Graph<T> &, Var, Var);                                                                   \
  template Var ops::mul(Graph<T> &, Var, Var);                                                                   \
  template Var ops::scale(Graph<T> &, Var, T);                                                                   \
  template Var ops::sum(Graph<T> &, Var);                                                                        \
  template Var ops::concat(Graph<T> &, const std::vector<Var> &);                                                \
  template Var ops::slice(Graph<T> &, Var, std::size_t, std::size_t);                                            \
  template Var ops::reshape(Graph<T> &, Var, Shape);                                                             \
  template Var ops::relu(Graph<T> &, Var);                                                                       \
  template Var ops::softmax(Graph<T> &, Var);                                                                    \
  template Var ops::dense(Graph<T> &, Var, Var, Var);                                                            \
  template Var ops::lstm_step(Graph<T> &, Var, Var, Var, Var, Var);                                              \
  template Var ops::conv2d(Graph<T> &, Var, Var, Var, Conv2dSpec);                                               \
  template Var ops::maxpool2d(Graph<T> &, Var, std::size_t, std::size_t);                                        \
  template Var ops::scale_channels(Graph<T> &, Var, Var);                                                        \
  template Var ops::scatter_cells(Graph<T> &, const std::vector<Var> &,                                          \
                                  const std::vector<std::pair<std::size_t, std::size_t>> &, std::size_t);        \
  template Var ops::sum_cells(Graph<T> &, Var);

SOCIALMASK_INSTANTIATE_OPS(float)
SOCIALMASK_INSTANTIATE_OPS(double)

#undef SOCIALMASK_INSTANTIATE_OPS

}  // namespace socialmask
