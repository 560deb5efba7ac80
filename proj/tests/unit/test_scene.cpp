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
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "socialmask/core/rng.hpp"
#include "socialmask/scene/batch.hpp"
#include "socialmask/scene/grid.hpp"
#include "socialmask/scene/instances.hpp"
#include "socialmask/scene/scene_io.hpp"
#include "socialmask/scene/synthetic.hpp"

using namespace socialmask;

namespace
{

// Scene built from per-agent straight-line tracks: agent i is present in
// frames [first, last] at start + t * velocity.
struct Mover
{
  std::int64_t id;
  AgentClass cls;
  Vec3 start;
  Vec3 velocity;
  std::int64_t first;
  std::int64_t last;
};

Scene make_scene(const std::vector<Mover> & movers, std::int64_t n_frames)
{
  Scene s;
  s.scene_id = "hand";
  for (std::int64_t t = 0; t < n_frames; ++t) {
    Frame f;
    f.t = t;
    for (const auto & m : movers) {
      if (t >= m.first && t <= m.last) {
        const double k = static_cast<double>(t);
        f.agents.push_back({m.id, m.cls,
                            Vec3{m.start.x + k * m.velocity.x, m.start.y + k * m.velocity.y,
                                 m.start.z + k * m.velocity.z}});
      }
    }
    s.frames.push_back(f);
  }
  return s;
}

double mean_agents_per_frame(const Scene & s)
{
  double total = 0.0;
  for (const auto & f : s.frames) {
    total += static_cast<double>(f.agents.size());
  }
  return s.frames.empty() ? 0.0 : total / static_cast<double>(s.frames.size());
}

// Closest approach of every pair of agents that comes within `encounter`
// meters of each other at some frame, averaged over those pairs.
double mean_min_distance(const std::vector<Scene> & scenes, double encounter = 5.0)
{
  double total = 0.0;
  std::size_t n = 0;
  for (const auto & s : scenes) {
    std::map<std::pair<std::int64_t, std::int64_t>, double> closest;
    for (const auto & f : s.frames) {
      for (std::size_t i = 0; i < f.agents.size(); ++i) {
        for (std::size_t j = i + 1; j < f.agents.size(); ++j) {
          const auto key = std::minmax(f.agents[i].id, f.agents[j].id);
          const double d = planar_distance(f.agents[i].position, f.agents[j].position);
          const auto [it, fresh] = closest.try_emplace(key, d);
          if (!fresh) {
            it->second = std::min(it->second, d);
          }
        }
      }
    }
    for (const auto & [key, d] : closest) {
      if (d < encounter) {
        total += d;
        ++n;
      }
    }
  }
  return total / static_cast<double>(n);
}

}  // namespace

// ---------------------------------------------------------------- types

TEST_CASE("agent class names round trip")
{
  for (auto cls : kAgentClasses) {
    CHECK(parse_agent_class(to_string(cls)) == cls);
  }
  CHECK_FALSE(parse_agent_class("truck").has_value());
}

TEST_CASE("validate_scene rejects broken invariants")
{
  Scene s = make_scene({{1, AgentClass::Vehicle, {0, 0, 0}, {1, 0, 0}, 0, 3}}, 4);
  CHECK_NOTHROW(validate_scene(s));

  Scene dup = s;
  dup.frames[1].agents.push_back(dup.frames[1].agents[0]);
  CHECK_THROWS_AS(validate_scene(dup), std::invalid_argument);

  Scene order = s;
  order.frames[2].t = 1;
  CHECK_THROWS_AS(validate_scene(order), std::invalid_argument);

  Scene nan = s;
  nan.frames[0].agents[0].position.x = std::nan("");
  CHECK_THROWS_AS(validate_scene(nan), std::invalid_argument);
}

// ---------------------------------------------------------------- grid

TEST_CASE("assign_grid_cell examples")
{
  const GridSpec g;
  CHECK(assign_grid_cell(0.0, 0.0, g) == GridCell{5, 5});
  CHECK(assign_grid_cell(-15.0, -15.0, g) == GridCell{0, 0});
  CHECK_FALSE(assign_grid_cell(15.0, 0.0, g).has_value());
  CHECK_FALSE(assign_grid_cell(0.0, 15.0, g).has_value());
  CHECK(assign_grid_cell(14.999, 14.999, g) == GridCell{10, 10});
  // Rows follow dy, columns follow dx.
  CHECK(assign_grid_cell(-15.0, 14.0, g) == GridCell{10, 0});
  CHECK_THROWS_AS(assign_grid_cell(std::nan(""), 0.0, g), std::invalid_argument);
  CHECK_THROWS_AS(assign_grid_cell(0.0, 0.0, GridSpec{30.0, 0}), std::invalid_argument);
}

TEST_CASE("grid cells tile the region")
{
  const GridSpec g;
  const double w = g.cell_size();
  Rng rng(7);
  std::vector<std::size_t> counts(g.cells * g.cells, 0);
  for (int i = 0; i < 20000; ++i) {
    const double dx = rng.uniform(-15.0, 15.0);
    const double dy = rng.uniform(-15.0, 15.0);
    const auto cell = assign_grid_cell(dx, dy, g);
    REQUIRE(cell.has_value());
    // The point lies in the cell's half-open box.
    const double x0 = -15.0 + static_cast<double>(cell->col) * w;
    const double y0 = -15.0 + static_cast<double>(cell->row) * w;
    CHECK(dx >= x0 - 1e-9);
    CHECK(dx < x0 + w + 1e-9);
    CHECK(dy >= y0 - 1e-9);
    CHECK(dy < y0 + w + 1e-9);
    ++counts[cell->row * g.cells + cell->col];
  }
  CHECK(std::count(counts.begin(), counts.end(), 0u) == 0);
  CHECK(w * static_cast<double>(g.cells) == doctest::Approx(g.region_m));
  // Cell boundaries themselves belong to the upper cell.
  for (std::size_t c = 0; c < g.cells; ++c) {
    const double edge = -15.0 + static_cast<double>(c) * w;
    CHECK(assign_grid_cell(edge + 1e-9, 0.0, g)->col == c);
  }
}

// ---------------------------------------------------------------- instances

TEST_CASE("one agent over ten frames yields one instance without neighbors")
{
  const Scene s = make_scene({{1, AgentClass::Pedestrian, {0, 0, 0}, {0.5, 0, 0}, 0, 9}}, 10);
  const auto r = extract_instances(s, ExtractionConfig{});
  REQUIRE(r.instances.size() == 1);
  const auto & inst = r.instances[0];
  CHECK(inst.anchor_t == 4);
  CHECK(inst.target.samples.size() == 5);
  CHECK(inst.ground_truth.size() == 5);
  CHECK(inst.neighbors.empty());
  CHECK(inst.ground_truth.back().x == doctest::Approx(4.5));
  CHECK(inst.instance_id == "hand:4:1");
}

TEST_CASE("agents 40 m apart are not neighbors")
{
  const Scene s = make_scene({{1, AgentClass::Vehicle, {0, 0, 0}, {1, 0, 0}, 0, 9},
                              {2, AgentClass::Vehicle, {0, 40, 0}, {1, 0, 0}, 0, 9}},
                             10);
  const auto r = extract_instances(s, ExtractionConfig{});
  REQUIRE(r.instances.size() == 2);
  for (const auto & inst : r.instances) {
    CHECK(inst.neighbors.empty());
  }
  CHECK(r.report.out_of_region == 2);
}

TEST_CASE("neighbor cells match a brute-force assignment")
{
  const Scene s = make_scene({{1, AgentClass::Vehicle, {0, 0, 0}, {1, 0, 0}, 0, 9},
                              {2, AgentClass::Pedestrian, {3, 2, 0}, {0, 0.2, 0}, 0, 9},
                              {3, AgentClass::Rider, {-6, -5, 0}, {0.5, 0, 0}, 2, 9},
                              {4, AgentClass::Pedestrian, {10, -12, 0}, {0, 0, 0}, 0, 9}},
                             10);
  const GridSpec g;
  const auto r = extract_instances(s, ExtractionConfig{});
  REQUIRE(r.instances.size() == 3);  // agent 3 lacks a full history at t=4
  for (const auto & inst : r.instances) {
    const Vec3 c = inst.target.last_position();
    std::set<std::int64_t> seen;
    for (std::size_t j = 0; j < inst.neighbors.size(); ++j) {
      const auto & n = inst.neighbors[j];
      const Vec3 p = n.last_position();
      // Brute force: scan every cell for the one containing the offset.
      std::optional<GridCell> brute;
      for (std::size_t row = 0; row < g.cells; ++row) {
        for (std::size_t col = 0; col < g.cells; ++col) {
          const double x0 = -15.0 + static_cast<double>(col) * g.cell_size();
          const double y0 = -15.0 + static_cast<double>(row) * g.cell_size();
          const double dx = p.x - c.x;
          const double dy = p.y - c.y;
          if (dx >= x0 && dx < x0 + g.cell_size() && dy >= y0 && dy < y0 + g.cell_size()) {
            brute = GridCell{row, col};
          }
        }
      }
      REQUIRE(brute.has_value());
      CHECK(inst.cells[j] == *brute);
      CHECK(n.samples.back().t == inst.anchor_t);
      CHECK(n.samples.size() <= 5);
      seen.insert(n.agent_id);
      if (j > 0) {
        CHECK(planar_distance(inst.neighbors[j - 1].last_position(), c) <= planar_distance(p, c));
      }
    }
    CHECK(seen.count(inst.target.agent_id) == 0);
  }
  // Agent 3 appears from frame 2, so at anchor 4 its run has 3 samples.
  const auto & first = r.instances[0];
  const auto it = std::find_if(first.neighbors.begin(), first.neighbors.end(),
                               [](const AgentTrack & t) { return t.agent_id == 3; });
  REQUIRE(it != first.neighbors.end());
  CHECK(it->samples.size() == 3);
}

TEST_CASE("cell collisions keep the nearer agent, ties to the smaller id")
{
  AgentTrack target{1, AgentClass::Vehicle, {{0, {0, 0, 0}}}};
  AgentTrack near{7, AgentClass::Pedestrian, {{0, {0.5, 0.2, 0}}}};
  AgentTrack far{3, AgentClass::Pedestrian, {{0, {1.0, 1.0, 0}}}};
  AgentTrack tie_a{9, AgentClass::Rider, {{0, {-10.0, 10.0, 0}}}};
  AgentTrack tie_b{8, AgentClass::Rider, {{0, {-10.0, 10.0, 0}}}};
  ExtractionReport report;
  const auto inst = assemble_instance(target, {far, near, tie_a, tie_b}, {}, GridSpec{}, &report);
  REQUIRE(inst.neighbors.size() == 2);
  CHECK(inst.neighbors[0].agent_id == 7);
  CHECK(inst.neighbors[1].agent_id == 8);
  CHECK(report.cell_collisions == 2);
}

TEST_CASE("extracted neighbors always lie inside the region")
{
  SyntheticConfig cfg;
  cfg.seed = 11;
  cfg.n_frames = 30;
  const auto r = extract_instances(generate_synthetic_scene(cfg), ExtractionConfig{});
  REQUIRE(!r.instances.empty());
  for (const auto & inst : r.instances) {
    const Vec3 c = inst.target.last_position();
    for (const auto & n : inst.neighbors) {
      const Vec3 p = n.last_position();
      CHECK(assign_grid_cell(p.x - c.x, p.y - c.y, GridSpec{}).has_value());
    }
  }
}

// ---------------------------------------------------------------- batch

TEST_CASE("batch of one instance without neighbors has one masked slot")
{
  const Scene s = make_scene({{1, AgentClass::Pedestrian, {0, 0, 0}, {0.5, 0, 0}, 0, 9}}, 10);
  const auto r = extract_instances(s, ExtractionConfig{});
  const SceneBatch b = build_batch(r.instances);
  CHECK(b.max_neighbors == 1);
  CHECK(b.max_history == 1);
  CHECK_FALSE(b.neighbor_valid(0, 0));
  CHECK(b.valid_neighbor_count(0) == 0);
  CHECK(b.target_history.shape() == Shape{1, 5, 3});
  CHECK(b.ground_truth.shape() == Shape{1, 5, 3});
}

TEST_CASE("neighbor histories of lengths 3 and 7 pad to 7")
{
  AgentTrack target{1, AgentClass::Vehicle, {}};
  AgentTrack a{2, AgentClass::Pedestrian, {}};
  AgentTrack c{3, AgentClass::Pedestrian, {}};
  for (std::int64_t t = 0; t < 7; ++t) {
    target.samples.push_back({t, {static_cast<double>(t), 0, 0}});
    c.samples.push_back({t, {static_cast<double>(t), 3, 1}});
  }
  for (std::int64_t t = 4; t < 7; ++t) {
    a.samples.push_back({t, {1, static_cast<double>(t), 2}});
  }
  const auto inst = assemble_instance(target, {a, c}, std::vector<Vec3>(5), GridSpec{});
  const SceneBatch b = build_batch(std::vector<PredictionInstance>{inst});
  CHECK(b.max_history == 7);
  CHECK(b.neighbor_history.shape() == Shape{1, 2, 7, 3});
  std::vector<std::int32_t> lengths(b.neighbor_length.begin(), b.neighbor_length.end());
  std::sort(lengths.begin(), lengths.end());
  CHECK(lengths == std::vector<std::int32_t>{3, 7});
  for (std::size_t j = 0; j < 2; ++j) {
    const auto len = static_cast<std::size_t>(b.neighbor_length[j]);
    for (std::size_t t = len; t < 7; ++t) {
      for (std::size_t k = 0; k < 3; ++k) {
        CHECK(b.neighbor_history[(j * 7 + t) * 3 + k] == 0.0f);
      }
    }
    CHECK(b.neighbor_history[(j * 7 + 0) * 3 + 2] != 0.0f);
  }
}

TEST_CASE("batch of 256 instances")
{
  SyntheticConfig cfg;
  cfg.seed = 3;
  auto r = extract_instances(generate_synthetic_corpus(cfg, 2), ExtractionConfig{});
  REQUIRE(r.instances.size() >= 256);
  const auto batches = build_batches(r.instances, 256);
  const SceneBatch & b = batches.front();
  CHECK(b.size == 256);
  CHECK(b.neighbor_history.shape() == Shape{256, b.max_neighbors, b.max_history, 3});
  CHECK(b.target_history.shape() == Shape{256, 5, 3});
  std::size_t total = 0;
  for (const auto & x : batches) {
    total += x.size;
  }
  CHECK(total == r.instances.size());
  CHECK_THROWS_AS(build_batch(std::span<const PredictionInstance>{}), std::invalid_argument);
}

// ---------------------------------------------------------------- generator

TEST_CASE("generator is deterministic in its seed")
{
  SyntheticConfig cfg;
  cfg.seed = 42;
  const Scene a = generate_synthetic_scene(cfg);
  const Scene b = generate_synthetic_scene(cfg);
  CHECK(a == b);
  cfg.seed = 43;
  CHECK_FALSE(generate_synthetic_scene(cfg) == a);
  CHECK_NOTHROW(validate_scene(a));
  CHECK(a.frames.size() == cfg.n_frames);
}

TEST_CASE("generator produces every class")
{
  SyntheticConfig cfg;
  cfg.seed = 5;
  std::set<AgentClass> seen;
  for (const auto & s : generate_synthetic_corpus(cfg, 3)) {
    for (const auto & f : s.frames) {
      for (const auto & a : f.agents) {
        seen.insert(a.agent_class);
      }
    }
  }
  CHECK(seen.size() == 3);
}

TEST_CASE("high density has more agents per frame than low")
{
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SyntheticConfig cfg;
    cfg.seed = seed;
    cfg.density = Density::High;
    const double high = mean_agents_per_frame(generate_synthetic_scene(cfg));
    cfg.density = Density::Low;
    const double low = mean_agents_per_frame(generate_synthetic_scene(cfg));
    CHECK(high > low);
  }
}

TEST_CASE("without interaction vehicles stay exactly on their routes")
{
  SyntheticConfig cfg;
  cfg.seed = 9;
  cfg.interaction = false;
  const auto trace = simulate_scene(cfg);
  std::size_t checked = 0;
  for (const auto & f : trace.scene.frames) {
    for (const auto & a : f.agents) {
      if (a.agent_class != AgentClass::Vehicle) {
        continue;
      }
      const auto & route = trace.vehicle_routes.at(a.id);
      CHECK(route.distance_to(a.position.x, a.position.y) < 1e-9);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("interaction increases the mean minimum inter-agent distance")
{
  SyntheticConfig cfg;
  for (std::uint64_t seed : {21, 22, 23}) {
    cfg.seed = seed;
    cfg.interaction = true;
    const double with = mean_min_distance(generate_synthetic_corpus(cfg, 8));
    cfg.interaction = false;
    const double without = mean_min_distance(generate_synthetic_corpus(cfg, 8));
    CHECK(with > without);
  }
}

TEST_CASE("invalid generator configs are rejected")
{
  SyntheticConfig cfg;
  cfg.n_frames = 0;
  CHECK_THROWS_AS(generate_synthetic_scene(cfg), std::invalid_argument);
  cfg = SyntheticConfig{};
  cfg.class_mix = ClassMix{0.0, 0.0, 0.0};
  CHECK_THROWS_AS(generate_synthetic_scene(cfg), std::invalid_argument);
  cfg = SyntheticConfig{};
  cfg.frame_period_s = -0.2;
  CHECK_THROWS_AS(generate_synthetic_scene(cfg), std::invalid_argument);
  cfg = SyntheticConfig{};
  cfg.class_mix.rider = -1.0;
  CHECK_THROWS_AS(generate_synthetic_scene(cfg), std::invalid_argument);
  CHECK(parse_density("high") == Density::High);
  CHECK_FALSE(parse_density("medium").has_value());
}

// ---------------------------------------------------------------- import

TEST_CASE("export then import reproduces the scenes")
{
  SyntheticConfig cfg;
  cfg.seed = 77;
  cfg.position_noise_m = 0.05;
  const auto scenes = generate_synthetic_corpus(cfg, 2);
  const auto path = std::filesystem::temp_directory_path() / "socialmask_roundtrip.jsonl";
  export_scenes(path, scenes);
  const auto back = import_scenes(path);
  std::filesystem::remove(path);
  REQUIRE(back.size() == 2);
  CHECK(back == scenes);
}

TEST_CASE("a line missing class is reported with its line number")
{
  std::istringstream in(
    R"({"scene_id":"a","frame_period_s":0.2,"frames":[{"t":0,"agents":[{"id":1,"class":"vehicle","x":0,"y":0,"z":0}]}]})"
    "\n"
    R"({"scene_id":"b","frame_period_s":0.2,"frames":[{"t":0,"agents":[{"id":1,"x":0,"y":0,"z":0}]}]})"
    "\n");
  try {
    read_scenes(in);
    FAIL("expected a format error");
  } catch (const SceneFormatError & e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("class") != std::string::npos);
  }
}

TEST_CASE("import reads every scene and tolerates empty input")
{
  std::istringstream two(
    R"({"scene_id":"a","frame_period_s":0.2,"frames":[]})"
    "\n\n"
    R"({"scene_id":"b","frame_period_s":0.1,"frames":[{"t":3,"agents":[]}]})"
    "\n");
  const auto scenes = read_scenes(two);
  REQUIRE(scenes.size() == 2);
  CHECK(scenes[1].frame_period_s == 0.1);
  std::istringstream empty("");
  CHECK(read_scenes(empty).empty());

  std::istringstream bad("{not json}\n");
  CHECK_THROWS_AS(read_scenes(bad), SceneFormatError);
  std::istringstream wrong_class(
    R"({"scene_id":"a","frame_period_s":0.2,"frames":[{"t":0,"agents":[{"id":1,"class":"bus","x":0,"y":0,"z":0}]}]})");
  CHECK_THROWS_AS(read_scenes(wrong_class), SceneFormatError);
}
