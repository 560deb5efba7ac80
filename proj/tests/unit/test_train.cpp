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
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "socialmask/core/checkpoint.hpp"
#include "socialmask/core/rng.hpp"
#include "socialmask/scene/synthetic.hpp"
#include "socialmask/train/ablation.hpp"
#include "socialmask/train/baselines.hpp"
#include "socialmask/train/evaluate.hpp"
#include "socialmask/train/metrics.hpp"
#include "socialmask/train/trainer.hpp"

using namespace socialmask;

namespace
{

Trajectory random_trajectory(Rng & rng, std::size_t steps)
{
  Trajectory t;
  for (std::size_t i = 0; i < steps; ++i) {
    t.push_back({rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-1, 1)});
  }
  return t;
}

std::vector<PredictionInstance> small_corpus(std::uint64_t seed, std::size_t scenes = 2)
{
  SyntheticConfig sc;
  sc.seed = seed;
  sc.n_frames = 20;
  ExtractionConfig ec;
  ec.anchor_stride = 3;
  return extract_instances(generate_synthetic_corpus(sc, scenes), ec).instances;
}

TrainConfig quick_config(std::size_t epochs)
{
  TrainConfig c = desk_train_config(ModelConfig::make(5, 5), 3);
  c.max_epochs = epochs;
  return c;
}

}  // namespace

// ---------------------------------------------------------------- metrics

TEST_CASE("displacement metric examples")
{
  const std::vector<Trajectory> gt{{{0, 0, 0}, {0, 0, 0}}};
  const std::vector<Trajectory> pred{{{3, 0, 0}, {0, 4, 0}}};
  CHECK(ade(pred, gt) == 3.5);
  CHECK(mde(pred, gt) == 4.0);
  CHECK(fde(pred, gt) == 4.0);
  CHECK(ade(gt, gt) == 0.0);
  CHECK(mde(gt, gt) == 0.0);
  CHECK(fde(gt, gt) == 0.0);

  const std::vector<Trajectory> gt2{{{0, 0, 0}}, {{0, 0, 0}}};
  const std::vector<Trajectory> pred2{{{1, 0, 0}}, {{0, 0, 3}}};
  CHECK(ade(pred2, gt2) == 2.0);

  CHECK_THROWS_AS(ade({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(mde(pred, gt2), std::invalid_argument);
  CHECK_THROWS_AS(fde({{{0, 0, 0}}}, gt), std::invalid_argument);
}

TEST_CASE("metric properties on random instances")
{
  Rng rng(1);
  std::vector<Trajectory> preds;
  std::vector<Trajectory> gts;
  std::vector<Trajectory> preds1;
  std::vector<Trajectory> gts1;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t steps = 1 + rng.below(9);
    preds.push_back(random_trajectory(rng, steps));
    gts.push_back(random_trajectory(rng, steps));
    preds1.push_back(random_trajectory(rng, 1));
    gts1.push_back(random_trajectory(rng, 1));
    CHECK(ade({preds.back()}, {gts.back()}) <= mde({preds.back()}, {gts.back()}));
  }
  CHECK(ade(preds, gts) <= mde(preds, gts));
  CHECK(fde(preds1, gts1) == ade(preds1, gts1));

  // Permutation and translation invariance.
  auto rp = preds;
  auto rg = gts;
  std::reverse(rp.begin(), rp.end());
  std::reverse(rg.begin(), rg.end());
  CHECK(fde(rp, rg) == doctest::Approx(fde(preds, gts)).epsilon(1e-12));
  const Vec3 shift{12.5, -3.25, 0.5};
  for (auto * set : {&rp, &rg}) {
    for (auto & t : *set) {
      for (auto & p : t) {
        p = {p.x + shift.x, p.y + shift.y, p.z + shift.z};
      }
    }
  }
  CHECK(ade(rp, rg) == doctest::Approx(ade(preds, gts)).epsilon(1e-9));
}

TEST_CASE("metrics report per class and JSON layout")
{
  const std::vector<Trajectory> gt{{{0, 0, 0}}, {{0, 0, 0}}, {{0, 0, 0}}};
  const std::vector<Trajectory> pred{{{1, 0, 0}}, {{2, 0, 0}}, {{6, 0, 0}}};
  const auto r = compute_metrics(pred, gt, {AgentClass::Vehicle, AgentClass::Vehicle, AgentClass::Rider});
  CHECK(r.all.count == 3);
  CHECK(r.all.ade == 3.0);
  REQUIRE(r.per_class[class_index(AgentClass::Vehicle)].has_value());
  CHECK(r.per_class[class_index(AgentClass::Vehicle)]->ade == 1.5);
  CHECK(r.per_class[class_index(AgentClass::Rider)]->fde == 6.0);
  CHECK_FALSE(r.per_class[class_index(AgentClass::Pedestrian)].has_value());

  const auto j = nlohmann::json::parse(metrics_to_json(r));
  std::set<std::string> keys;
  for (const auto & [k, v] : j.items()) {
    keys.insert(k);
    if (!v.is_null()) {
      std::set<std::string> inner;
      for (const auto & [ik, iv] : v.items()) {
        inner.insert(ik);
      }
      CHECK(inner == std::set<std::string>{"ADE", "MDE", "FDE"});
    }
  }
  CHECK(keys == std::set<std::string>{"all", "pedestrian", "vehicle", "rider"});
  CHECK(j["pedestrian"].is_null());
  CHECK(j["all"]["ADE"] == 3.0);
}

TEST_CASE("a predictor returning the ground truth scores zero")
{
  const auto insts = small_corpus(5);
  REQUIRE_FALSE(insts.empty());
  const auto r = evaluate_predictor([](const PredictionInstance & inst) { return inst.ground_truth; }, insts);
  CHECK(r.all.ade == 0.0);
  CHECK(r.all.mde == 0.0);
  CHECK(r.all.fde == 0.0);
  for (const auto & c : r.per_class) {
    if (c) {
      CHECK(c->ade == 0.0);
    }
  }
}

// ---------------------------------------------------------------- baselines

TEST_CASE("linear regression baseline examples")
{
  const auto cv = linear_regression_baseline({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, 2);
  REQUIRE(cv.size() == 2);
  CHECK(cv[0] == Vec3{3, 0, 0});
  CHECK(cv[1] == Vec3{4, 0, 0});
  const auto still = linear_regression_baseline({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}, {1, 2, 3}}, 3);
  for (const auto & p : still) {
    CHECK(p == Vec3{1, 2, 3});
  }
  CHECK_THROWS_AS(linear_regression_baseline({{0, 0, 0}}, 2), std::invalid_argument);
}

TEST_CASE("linear regression matches the normal equations")
{
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(8);
    Trajectory h;
    const double a = rng.uniform(-1, 1);
    for (std::size_t i = 1; i <= n; ++i) {
      const double t = static_cast<double>(i);
      h.push_back({a * t * t + rng.uniform(-1, 1), rng.uniform(-5, 5), 0.1 * t});
    }
    // [n, St; St, Stt] [b0; b1] = [Sy; Sty], solved by Cramer's rule.
    double st = 0.0;
    double stt = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      st += static_cast<double>(i);
      stt += static_cast<double>(i * i);
    }
    const double det = static_cast<double>(n) * stt - st * st;
    auto fit = [&](auto coord) {
      double sy = 0.0;
      double sty = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sy += coord(h[i]);
        sty += static_cast<double>(i + 1) * coord(h[i]);
      }
      return std::pair{(stt * sy - st * sty) / det, (static_cast<double>(n) * sty - st * sy) / det};
    };
    const auto [x0, x1] = fit([](const Vec3 & p) { return p.x; });
    const auto [y0, y1] = fit([](const Vec3 & p) { return p.y; });
    const auto [z0, z1] = fit([](const Vec3 & p) { return p.z; });
    const auto out = linear_regression_baseline(h, 4);
    for (std::size_t k = 0; k < 4; ++k) {
      const double t = static_cast<double>(n + k + 1);
      CHECK(out[k].x == doctest::Approx(x0 + x1 * t).epsilon(1e-9));
      CHECK(out[k].y == doctest::Approx(y0 + y1 * t).epsilon(1e-9));
      CHECK(out[k].z == doctest::Approx(z0 + z1 * t).epsilon(1e-9));
    }
  }
}

TEST_CASE("encoder-decoder baseline configuration")
{
  ModelConfig base = ModelConfig::make(5, 5);
  base.decoder.head = HeadKind::Gaussian;
  const auto ae = lstm_ae_config(base);
  CHECK(ae.fusion.kind == FusionKind::None);
  CHECK(ae.decoder.head == HeadKind::L2);
  const auto names = init_model_params(ae, 1).names();
  for (const auto & n : names) {
    CHECK(n.rfind("fusion", 0) != 0);
  }
  const auto insts = small_corpus(6);
  const auto preds = predict_instances(init_model_params(ae, 1), ae, insts);
  CHECK(preds.front().points.shape() == Shape{5, 3});
}

// ---------------------------------------------------------------- training

TEST_CASE("learning rate staircase")
{
  TrainConfig c;
  for (std::size_t e = 0; e < 10; ++e) {
    CHECK(learning_rate(c, e) == 1e-3);
  }
  for (std::size_t e = 10; e < 20; ++e) {
    CHECK(learning_rate(c, e) == doctest::Approx(1e-4).epsilon(1e-12));
  }
  CHECK(learning_rate(c, 20) == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK(c.batch_size == 256);
  c.decay_every = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("training is reproducible and the loss falls")
{
  const auto insts = small_corpus(7);
  REQUIRE(insts.size() >= 16);
  const std::vector<PredictionInstance> fit(insts.begin(), insts.begin() + 8);
  const std::vector<PredictionInstance> val(insts.begin() + 8, insts.begin() + 16);
  TrainConfig c = quick_config(30);
  const auto a = train(c, fit, val);
  const auto b = train(c, fit, val);
  CHECK(encode_checkpoint({"", a.params}) == encode_checkpoint({"", b.params}));
  REQUIRE(a.log.size() == 30);
  CHECK(a.log.back().train_loss < 0.5 * a.log.front().train_loss);
  for (std::size_t e = 0; e < a.log.size(); ++e) {
    CHECK(a.log[e].train_loss == b.log[e].train_loss);
    CHECK(a.log[e].val_ade == b.log[e].val_ade);
  }
  CHECK(a.best_val_ade == a.log[a.best_epoch].val_ade);

  c.seed = 4;
  const auto other = train(c, fit, val);
  CHECK(encode_checkpoint({"", other.params}) != encode_checkpoint({"", a.params}));
}

TEST_CASE("early stopping and divergence")
{
  const auto insts = small_corpus(8);
  const std::vector<PredictionInstance> fit(insts.begin(), insts.begin() + 4);
  const std::vector<PredictionInstance> val(insts.begin() + 4, insts.begin() + 8);
  TrainConfig c = quick_config(20);
  c.lr = 1e-12;
  c.patience = 1;
  const auto stalled = train(c, fit, val);
  CHECK(stalled.stopped_early);
  CHECK(stalled.log.size() == 2);

  c.lr = 1e30;
  c.patience = 100;
  CHECK_THROWS_AS(train(c, fit, val), DivergenceError);
  CHECK_THROWS_AS(train(c, {}, val), std::invalid_argument);
}

TEST_CASE("learning curve CSV")
{
  const std::vector<EpochLog> log{{0, 1e-3, 2.5, 3.0, 1.25}, {1, 1e-3, 2.0, 2.5, 1.0}};
  const auto csv = learning_curve_csv(log);
  CHECK(csv.rfind("epoch,lr,train_loss,val_loss,val_ade\n", 0) == 0);
  CHECK(csv.find("1,0.001,2,2.5,1\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("scene split is seeded, disjoint and complete")
{
  SyntheticConfig sc;
  sc.n_frames = 10;
  const auto scenes = generate_synthetic_corpus(sc, 10);
  const auto [a, b] = split_scenes(scenes, 0.8, 3);
  CHECK(a.size() == 8);
  CHECK(b.size() == 2);
  std::set<std::string> ids;
  for (const auto * part : {&a, &b}) {
    for (const auto & s : *part) {
      ids.insert(s.scene_id);
    }
  }
  CHECK(ids.size() == 10);
  const auto [a2, b2] = split_scenes(scenes, 0.8, 3);
  CHECK(a2 == a);
  CHECK_THROWS_AS(split_scenes(scenes, 1.5, 3), std::invalid_argument);
}

// ---------------------------------------------------------------- ablation

TEST_CASE("ablation rows carry the paper's labels and differ only where named")
{
  const ModelConfig base = ModelConfig::make(5, 5);
  const auto rows = fusion_ablation_rows(base);
  std::vector<std::string> labels;
  for (const auto & r : rows) {
    labels.push_back(r.label);
  }
  CHECK(labels == std::vector<std::string>{"VLSTM + CON", "VLSTM + SP", "VLSTM + SCNN", "LSTM+Attention+SCNN",
                                           "VLSTM+Attention+SCNN"});
  CHECK(model_config_to_json(rows[4].model) == model_config_to_json(base));

  ModelConfig uniform = rows[2].model;
  uniform.fusion.mask = MaskKind::Attention;
  CHECK(model_config_to_json(uniform) == model_config_to_json(rows[4].model));
  ModelConfig fixed = rows[3].model;
  CHECK_FALSE(fixed.encoder.variable_length);
  fixed.encoder.variable_length = true;
  CHECK(model_config_to_json(fixed) == model_config_to_json(rows[4].model));
  CHECK(rows[0].model.fusion.kind == FusionKind::Con);
  CHECK(rows[1].model.fusion.kind == FusionKind::Sp);
  CHECK(horizon_label(7) == "7 frame");
}

TEST_CASE("experiment data: deterministic, split by scene, shared across horizons")
{
  CorpusSpec spec;
  spec.scene.n_frames = 30;
  spec.target_instances = 200;
  const auto a = make_experiment_data(spec, 11, 5);
  const auto b = make_experiment_data(spec, 11, 5);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  CHECK(a.train.size() + a.val.size() + a.test.size() >= 200);
  std::set<std::string> train_scenes;
  for (const auto & i : a.train) {
    train_scenes.insert(i.scene_id);
  }
  for (const auto * part : {&a.val, &a.test}) {
    for (const auto & i : *part) {
      CHECK(train_scenes.count(i.scene_id) == 0);
    }
  }
  const auto longer = make_experiment_data(spec, 11, 9);
  CHECK(longer.scenes == a.scenes);
  CHECK(longer.test.size() < a.test.size());
  CHECK(longer.test.front().ground_truth.size() == 9);
}

TEST_CASE("ablation run emits five rows and three horizons")
{
  CorpusSpec spec;
  spec.scene.n_frames = 20;
  spec.target_instances = 120;
  const auto results = run_ablation(ModelConfig::make(5, 5), spec, 2, [](TrainConfig & c) { c.max_epochs = 1; });
  REQUIRE(results.size() == 8);
  CHECK(results[4].label == "VLSTM+Attention+SCNN");
  CHECK(results[5].label == "5 frame");
  CHECK(results[5].test.all.ade == results[4].test.all.ade);
  CHECK(results[7].horizon == 9);
  const auto csv = ablation_csv(results);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(csv.find("ablation,VLSTM + SP,2,5,") != std::string::npos);
  CHECK(csv.find("horizon,9 frame,2,9,") != std::string::npos);
  CHECK(ablation_csv(run_ablation(ModelConfig::make(5, 5), spec, 2, [](TrainConfig & c) { c.max_epochs = 1; })) ==
        csv);
}
