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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "../support/gradcheck.hpp"
#include "../support/random_tensor.hpp"
#include "socialmask/core/adam.hpp"
#include "socialmask/core/checkpoint.hpp"
#include "socialmask/core/graph.hpp"
#include "socialmask/core/ops.hpp"
#include "socialmask/core/rng.hpp"

using namespace socialmask;
using socialmask::testing::check_gradients;
using socialmask::testing::random_tensor;

namespace
{

LstmWeights<float> zero_lstm(std::size_t input, std::size_t hidden)
{
  return {Tensor<float>(Shape{4 * hidden, input}), Tensor<float>(Shape{4 * hidden, hidden}),
          Tensor<float>(Shape{4 * hidden})};
}

// Weighted sum with fixed pseudo-random coefficients, so every output
// element gets a distinct upstream gradient.
template <typename T>
Var probe_loss(Graph<T> & g, Var v, std::uint64_t seed)
{
  Rng rng(seed);
  Tensor<T> w(g.shape(v));
  for (auto & x : w.data()) {
    x = static_cast<T>(rng.uniform(-1.0, 1.0));
  }
  return ops::sum(g, ops::mul(g, v, g.constant(std::move(w))));
}

}  // namespace

TEST_CASE("tensor shape invariant")
{
  CHECK_THROWS_AS(Tensor<float>(Shape{2, 3}, std::vector<float>(5)), ShapeError);
  Tensor<float> t(Shape{2, 3}, 1.5f);
  CHECK(t.size() == 6);
  CHECK(t.at({1, 2}) == 1.5f);
  CHECK_THROWS_AS(t.reshaped(Shape{4}), ShapeError);
  CHECK(Tensor<float>::scalar(2.0f).item() == 2.0f);
}

TEST_CASE("lstm_cell_step examples")
{
  SUBCASE("zero params and zero cell give zero state")
  {
    const auto w = zero_lstm(3, 2);
    const auto out = lstm_cell_step(Tensor<float>::vector({0.3f, -2.0f, 7.0f}), Tensor<float>(Shape{2}),
                                    Tensor<float>(Shape{2}), w);
    CHECK(out.hidden == Tensor<float>(Shape{2}));
    CHECK(out.cell == Tensor<float>(Shape{2}));
  }
  SUBCASE("zero params, c=1")
  {
    const auto w = zero_lstm(1, 1);
    const auto out = lstm_cell_step(Tensor<float>::vector({4.0f}), Tensor<float>(Shape{1}),
                                    Tensor<float>::vector({1.0f}), w);
    CHECK(out.cell[0] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(out.hidden[0] == doctest::Approx(0.5 * std::tanh(0.5)).epsilon(1e-6));
    CHECK(out.hidden[0] == doctest::Approx(0.23105).epsilon(1e-4));
  }
  SUBCASE("saturated forget gate carries the cell")
  {
    auto w = zero_lstm(1, 1);
    w.bias[1] = 20.0f;  // forget gate slot
    const auto out = lstm_cell_step(Tensor<float>::vector({0.0f}), Tensor<float>(Shape{1}),
                                    Tensor<float>::vector({2.0f}), w);
    CHECK(std::abs(out.cell[0] - 2.0f) < 1e-6f);
  }
  SUBCASE("dimension mismatch reports shapes")
  {
    const auto w = zero_lstm(3, 2);
    try {
      lstm_cell_step(Tensor<float>::vector({1.0f, 2.0f}), Tensor<float>(Shape{2}), Tensor<float>(Shape{2}), w);
      FAIL("expected ShapeError");
    } catch (const ShapeError & e) {
      CHECK(std::string(e.what()).find("expect") != std::string::npos);
    }
    CHECK_THROWS_AS(
      lstm_cell_step(Tensor<float>::vector({1.0f, 2.0f, 3.0f}), Tensor<float>(Shape{3}), Tensor<float>(Shape{2}), w),
      ShapeError);
  }
}

TEST_CASE("conv2d examples and properties")
{
  SUBCASE("sum of ones")
  {
    const auto out = conv2d(Tensor<float>(Shape{3, 3, 1}, 1.0f), Tensor<float>(Shape{3, 3, 1, 1}, 1.0f),
                            Tensor<float>(Shape{1}), Conv2dSpec{1, 0});
    REQUIRE(out.shape() == Shape{1, 1, 1});
    CHECK(out[0] == 9.0f);
  }
  SUBCASE("social grid geometry")
  {
    CHECK(conv2d_output_shape(Shape{11, 11, 20}, Shape{3, 3, 20, 64}, Conv2dSpec{2, 1}) == Shape{6, 6, 64});
    CHECK(conv2d_output_shape(Shape{6, 6, 64}, Shape{5, 5, 64, 16}, Conv2dSpec{2, 2}) == Shape{3, 3, 16});
  }
  SUBCASE("delta kernel is identity per channel")
  {
    Rng rng(3);
    const auto input = random_tensor(rng, Shape{5, 4, 3});
    Tensor<float> kernel(Shape{3, 3, 3, 3});
    for (std::size_t c = 0; c < 3; ++c) {
      kernel.at({1, 1, c, c}) = 1.0f;
    }
    const auto out = conv2d(input, kernel, Tensor<float>(Shape{3}), Conv2dSpec{1, 1});
    CHECK(out == input);
  }
  SUBCASE("kernel larger than padded input is rejected")
  {
    CHECK_THROWS_AS(conv2d(Tensor<float>(Shape{2, 2, 1}), Tensor<float>(Shape{5, 5, 1, 1}), Tensor<float>(Shape{1}),
                           Conv2dSpec{1, 1}),
                    ShapeError);
  }
  SUBCASE("linear in its input without bias")
  {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      const auto a = random_tensor(rng, Shape{7, 7, 4});
      const auto b = random_tensor(rng, Shape{7, 7, 4});
      const auto k = random_tensor(rng, Shape{3, 3, 4, 5});
      Tensor<float> ab(a.shape());
      for (std::size_t i = 0; i < ab.size(); ++i) {
        ab[i] = a[i] + b[i];
      }
      const Tensor<float> zero_bias(Shape{5});
      const auto fa = conv2d(a, k, zero_bias, Conv2dSpec{2, 1});
      const auto fb = conv2d(b, k, zero_bias, Conv2dSpec{2, 1});
      const auto fab = conv2d(ab, k, zero_bias, Conv2dSpec{2, 1});
      for (std::size_t i = 0; i < fab.size(); ++i) {
        CHECK(std::abs(fab[i] - (fa[i] + fb[i])) < 1e-5f);
      }
    }
  }
}

TEST_CASE("maxpool2d examples and window bounds")
{
  const Tensor<float> in(Shape{2, 2, 1}, {1, 2, 3, 4});
  const auto out = maxpool2d(in, 2, 2);
  REQUIRE(out.shape() == Shape{1, 1, 1});
  CHECK(out[0] == 4.0f);

  const auto flat = maxpool2d(Tensor<float>(Shape{4, 6, 2}, 0.75f), 2, 2);
  CHECK(flat.shape() == Shape{2, 3, 2});
  CHECK(std::all_of(flat.data().begin(), flat.data().end(), [](float v) { return v == 0.75f; }));

  CHECK(maxpool2d_output_shape(Shape{3, 3, 16}, 2, 2) == Shape{1, 1, 16});
  CHECK_THROWS_AS(maxpool2d(Tensor<float>(Shape{1, 1, 1}), 2, 2), ShapeError);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto x = random_tensor(rng, Shape{6, 6, 3});
    const auto y = maxpool2d(x, 2, 2);
    for (std::size_t oy = 0; oy < 3; ++oy) {
      for (std::size_t ox = 0; ox < 3; ++ox) {
        for (std::size_t c = 0; c < 3; ++c) {
          float lo = 1e9f;
          float hi = -1e9f;
          for (std::size_t dy = 0; dy < 2; ++dy) {
            for (std::size_t dx = 0; dx < 2; ++dx) {
              const float v = x.at({2 * oy + dy, 2 * ox + dx, c});
              lo = std::min(lo, v);
              hi = std::max(hi, v);
            }
          }
          const float p = y.at({oy, ox, c});
          CHECK(p <= hi);
          CHECK(p >= lo);
        }
      }
    }
  }
}

TEST_CASE("softmax examples and properties")
{
  auto s = softmax(Tensor<float>::vector({0.0f, 0.0f}));
  CHECK(s[0] == doctest::Approx(0.5));
  CHECK(s[1] == doctest::Approx(0.5));

  s = softmax(Tensor<float>::vector({static_cast<float>(std::log(2.0)), 0.0f}));
  CHECK(s[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(s[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-6));

  s = softmax(Tensor<float>::vector({1000.0f, 0.0f}));
  CHECK(s.all_finite());
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] < 1e-30f);

  CHECK_THROWS(softmax(Tensor<float>::vector({1.0f, std::nanf("")})));

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto logits = random_tensor(rng, Shape{121}, -8.0, 8.0);
    const auto p = softmax(logits);
    double total = 0.0;
    for (const float v : p.data()) {
      CHECK(v > 0.0f);
      CHECK(v < 1.0f);
      total += v;
    }
    CHECK(std::abs(total - 1.0) < 1e-6);

    // permutation equivariance
    std::vector<std::size_t> perm(121);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    Tensor<float> permuted(Shape{121});
    for (std::size_t i = 0; i < 121; ++i) {
      permuted[i] = logits[perm[i]];
    }
    const auto pp = softmax(permuted);
    for (std::size_t i = 0; i < 121; ++i) {
      CHECK(std::abs(pp[i] - p[perm[i]]) < 1e-7f);
    }
  }
}

TEST_CASE("backward on trivial losses")
{
  ParamStore<float> params;
  params.add("w", Tensor<float>::vector({0.5f, -1.0f, 2.0f}));
  params.add("unused", Tensor<float>::vector({3.0f}));

  SUBCASE("linear")
  {
    Graph<float> g(params);
    const auto x = g.constant(Tensor<float>::vector({4.0f, 5.0f, 6.0f}));
    const auto loss = ops::sum(g, ops::mul(g, g.param("w"), x));
    g.backward(loss, params);
    CHECK(params.grad("w") == Tensor<float>::vector({4.0f, 5.0f, 6.0f}));
    CHECK(params.grad("unused") == Tensor<float>::vector({0.0f}));
  }
  SUBCASE("squared norm")
  {
    Graph<float> g(params);
    const auto w = g.param("w");
    g.backward(ops::sum(g, ops::mul(g, w, w)), params);
    CHECK(params.grad("w") == Tensor<float>::vector({1.0f, -2.0f, 4.0f}));
  }
  SUBCASE("rejections")
  {
    Graph<float> empty(params);
    CHECK_THROWS_AS(empty.backward(Var{0}, params), std::logic_error);
    Graph<float> g(params);
    const auto w = g.param("w");
    CHECK_THROWS_AS(g.backward(w, params), ShapeError);  // not scalar
    CHECK_THROWS(g.backward(Var{42}, params));
    const auto loss = ops::sum(g, w);
    g.backward(loss, params);
    CHECK_THROWS_AS(g.backward(loss, params), std::logic_error);
  }
}

constexpr std::uint64_t kGradSeeds = 20;

#define CHECK_GRADIENTS(report)                                         \
  do {                                                                  \
    CHECK_MESSAGE((report).max_rel_error_f64 < 1e-3, (report).worst_f64); \
    CHECK_MESSAGE((report).max_rel_error_f32 < 1e-3, (report).worst_f32); \
  } while (0)

TEST_CASE("gradient check: lstm step chain")
{
  for (std::uint64_t seed = 0; seed < kGradSeeds; ++seed) {
    CAPTURE(seed);
    Rng rng(1000 + seed);
    ParamStore<float> p;
    p.add("x", random_tensor(rng, Shape{3}));
    p.add("state", random_tensor(rng, Shape{8}, -0.5, 0.5));
    p.add("w_ih", random_tensor(rng, Shape{16, 3}));
    p.add("w_hh", random_tensor(rng, Shape{16, 4}));
    p.add("b", random_tensor(rng, Shape{16}));
    const auto report = check_gradients(p, [&](auto & g) {
      auto s = g.param("state");
      for (int step = 0; step < 3; ++step) {
        s = ops::lstm_step(g, g.param("x"), s, g.param("w_ih"), g.param("w_hh"), g.param("b"));
      }
      return probe_loss(g, s, seed);
    });
    CHECK_GRADIENTS(report);
  }
}

TEST_CASE("gradient check: conv2d")
{
  for (std::uint64_t seed = 0; seed < kGradSeeds; ++seed) {
    CAPTURE(seed);
    Rng rng(2000 + seed);
    ParamStore<float> p;
    p.add("in", random_tensor(rng, Shape{5, 5, 2}));
    p.add("k", random_tensor(rng, Shape{3, 3, 2, 3}));
    p.add("b", random_tensor(rng, Shape{3}));
    const auto report = check_gradients(p, [&](auto & g) {
      return probe_loss(g, ops::conv2d(g, g.param("in"), g.param("k"), g.param("b"), Conv2dSpec{2, 1}), seed);
    });
    CHECK_GRADIENTS(report);
  }
}

TEST_CASE("gradient check: dense + softmax")
{
  for (std::uint64_t seed = 0; seed < kGradSeeds; ++seed) {
    CAPTURE(seed);
    Rng rng(3000 + seed);
    ParamStore<float> p;
    p.add("x", random_tensor(rng, Shape{5}));
    p.add("w", random_tensor(rng, Shape{9, 5}));
    p.add("b", random_tensor(rng, Shape{9}));
    const auto report = check_gradients(p, [&](auto & g) {
      return probe_loss(g, ops::softmax(g, ops::dense(g, g.param("x"), g.param("w"), g.param("b"))), seed);
    });
    CHECK_GRADIENTS(report);
  }
}

TEST_CASE("gradient check: relu, maxpool, scale_channels, scatter, sum_cells")
{
  for (std::uint64_t seed = 0; seed < kGradSeeds; ++seed) {
    CAPTURE(seed);
    Rng rng(4000 + seed);
    ParamStore<float> p;
    p.add("a", random_tensor(rng, Shape{4}));
    p.add("b", random_tensor(rng, Shape{4}));
    p.add("mask", random_tensor(rng, Shape{4, 4}, 0.1, 1.0));
    const auto report = check_gradients(p, [&](auto & g) {
      const auto map = ops::scatter_cells(g, {g.param("a"), g.param("b")}, {{0, 1}, {3, 2}}, 4);
      const auto masked = ops::scale_channels(g, map, g.param("mask"));
      const auto pooled = ops::maxpool2d(g, ops::relu(g, masked), 2, 2);
      const auto total = ops::concat(g, {pooled, ops::sum_cells(g, masked)});
      return probe_loss(g, total, seed);
    });
    CHECK_GRADIENTS(report);
  }
}

TEST_CASE("ops are deterministic")
{
  Rng rng(9);
  const auto in = random_tensor(rng, Shape{11, 11, 20});
  const auto k = random_tensor(rng, Shape{3, 3, 20, 64});
  const auto b = random_tensor(rng, Shape{64});
  CHECK(bit_identical(conv2d(in, k, b, Conv2dSpec{2, 1}), conv2d(in, k, b, Conv2dSpec{2, 1})));
  const auto logits = random_tensor(rng, Shape{121});
  CHECK(bit_identical(softmax(logits), softmax(logits)));
}

TEST_CASE("adam")
{
  SUBCASE("first step moves by lr against the gradient sign")
  {
    ParamStore<float> p;
    p.add("w", Tensor<float>::vector({1.0f}));
    p.mutable_grad("w")[0] = 0.5f;
    Adam<float> adam;
    adam.step(p, 0.001, 1);
    CHECK(std::abs((p.value("w")[0] - 1.0f) - (-0.001f)) < 1e-5f);
  }
  SUBCASE("zero gradient leaves parameters unchanged")
  {
    ParamStore<float> p;
    p.add("w", Tensor<float>::vector({1.0f, -2.0f}));
    Adam<float> adam;
    for (int t = 1; t <= 5; ++t) {
      adam.step(p, 0.01, t);
    }
    CHECK(p.value("w") == Tensor<float>::vector({1.0f, -2.0f}));
  }
  SUBCASE("rejects step 0")
  {
    ParamStore<float> p;
    p.add("w", Tensor<float>::vector({1.0f}));
    Adam<float> adam;
    CHECK_THROWS_AS(adam.step(p, 0.001, 0), std::invalid_argument);
  }
  SUBCASE("rejects missing gradients")
  {
    ParamStore<float> p;
    p.add("w", Tensor<float>::vector({1.0f}));
    p.grads().erase("w");
    Adam<float> adam;
    CHECK_THROWS_AS(adam.step(p, 0.001, 1), std::invalid_argument);
  }
  SUBCASE("identical runs are bit-identical")
  {
    auto run = [] {
      Rng rng(5);
      ParamStore<float> p;
      p.add("w", random_tensor(rng, Shape{10}));
      Adam<float> adam;
      for (int t = 1; t <= 20; ++t) {
        p.zero_grad();
        Graph<float> g(p);
        const auto w = g.param("w");
        g.backward(ops::sum(g, ops::mul(g, w, w)), p);
        adam.step(p, 0.01, t);
      }
      return p.value("w");
    };
    CHECK(bit_identical(run(), run()));
  }
}

TEST_CASE("checkpoint round trip is bit exact")
{
  Rng rng(17);
  Checkpoint ckpt;
  ckpt.metadata = R"({"position_scale":15.0})";
  ckpt.params.add("decoder.lstm.bias", random_tensor(rng, Shape{160}));
  ckpt.params.add("encoder.lstm.input_weight", random_tensor(rng, Shape{68, 3}));
  ckpt.params.add("fusion.conv1.kernel", random_tensor(rng, Shape{3, 3, 20, 64}));
  ckpt.params.mutable_value("decoder.lstm.bias")[0] = -0.0f;
  ckpt.params.mutable_value("decoder.lstm.bias")[1] = 1e-40f;  // subnormal

  const std::string bytes = encode_checkpoint(ckpt);
  CHECK(bytes.substr(0, 8) == "SMCKPT01");
  CHECK(static_cast<unsigned char>(bytes[8]) == 1);  // version, little-endian
  const auto back = decode_checkpoint(bytes);
  CHECK(back.metadata == ckpt.metadata);
  REQUIRE(back.params.names() == ckpt.params.names());
  for (const auto & name : ckpt.params.names()) {
    CHECK(bit_identical(back.params.value(name), ckpt.params.value(name)));
  }
  CHECK(encode_checkpoint(back) == bytes);

  CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 3)), CheckpointError);
  CHECK_THROWS_AS(decode_checkpoint("NOTACKPT"), CheckpointError);
  CHECK_THROWS_AS(decode_checkpoint(bytes + "x"), CheckpointError);
}
