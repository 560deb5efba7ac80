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

#include "socialmask/scene/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "socialmask/core/rng.hpp"

namespace socialmask
{

std::string_view to_string(Density density)
{
  return density == Density::Low ? "low" : "high";
}

std::optional<Density> parse_density(std::string_view name)
{
  if (name == "low") {
    return Density::Low;
  }
  if (name == "high") {
    return Density::High;
  }
  return std::nullopt;
}

void validate(const SyntheticConfig & config)
{
  const auto & mix = config.class_mix;
  if (!(mix.pedestrian >= 0.0 && mix.vehicle >= 0.0 && mix.rider >= 0.0)) {
    throw std::invalid_argument("synthetic config: class mix weights must be non-negative");
  }
  if (!(mix.pedestrian + mix.vehicle + mix.rider > 0.0)) {
    throw std::invalid_argument("synthetic config: class mix must have a positive weight");
  }
  if (config.n_frames == 0) {
    throw std::invalid_argument("synthetic config: n_frames must be positive");
  }
  if (!(config.frame_period_s > 0.0) || !std::isfinite(config.frame_period_s)) {
    throw std::invalid_argument("synthetic config: frame_period_s must be positive");
  }
  if (!(config.position_noise_m >= 0.0) || !std::isfinite(config.position_noise_m)) {
    throw std::invalid_argument("synthetic config: position_noise_m must be non-negative");
  }
  if (config.scene_id.empty()) {
    throw std::invalid_argument("synthetic config: scene_id must not be empty");
  }
}

// ---------------------------------------------------------------- Polyline

Polyline::Polyline(std::vector<std::pair<double, double>> points) : points_(std::move(points))
{
  if (points_.size() < 2) {
    throw std::invalid_argument("Polyline: need at least two points");
  }
  arc_.assign(points_.size(), 0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    arc_[i] = arc_[i - 1] + std::hypot(points_[i].first - points_[i - 1].first,
                                       points_[i].second - points_[i - 1].second);
  }
}

std::size_t Polyline::segment_at(double arc) const
{
  const auto it = std::upper_bound(arc_.begin(), arc_.end(), arc);
  const auto idx = static_cast<std::size_t>(std::distance(arc_.begin(), it));
  return std::clamp<std::size_t>(idx, 1, points_.size() - 1) - 1;
}

std::pair<double, double> Polyline::at(double arc) const
{
  const std::size_t i = segment_at(arc);
  const double len = arc_[i + 1] - arc_[i];
  const double u = len > 0.0 ? std::clamp((arc - arc_[i]) / len, 0.0, 1.0) : 0.0;
  const auto & a = points_[i];
  const auto & b = points_[i + 1];
  return {a.first + u * (b.first - a.first), a.second + u * (b.second - a.second)};
}

std::pair<double, double> Polyline::tangent(double arc) const
{
  const std::size_t i = segment_at(arc);
  const double dx = points_[i + 1].first - points_[i].first;
  const double dy = points_[i + 1].second - points_[i].second;
  const double len = std::hypot(dx, dy);
  return len > 0.0 ? std::pair{dx / len, dy / len} : std::pair{1.0, 0.0};
}

std::pair<double, double> Polyline::project(double x, double y, double arc_lo, double arc_hi) const
{
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_arc = 0.0;
  double best_lat = 0.0;
  const std::size_t first = arc_lo > 0.0 ? segment_at(arc_lo) : 0;
  for (std::size_t i = first; i + 1 < points_.size() && arc_[i] <= arc_hi; ++i) {
    const double ax = points_[i].first;
    const double ay = points_[i].second;
    const double dx = points_[i + 1].first - ax;
    const double dy = points_[i + 1].second - ay;
    const double len2 = dx * dx + dy * dy;
    const double u = len2 > 0.0 ? std::clamp(((x - ax) * dx + (y - ay) * dy) / len2, 0.0, 1.0) : 0.0;
    const double px = ax + u * dx;
    const double py = ay + u * dy;
    const double d2 = (x - px) * (x - px) + (y - py) * (y - py);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_arc = arc_[i] + u * (arc_[i + 1] - arc_[i]);
      const double len = std::sqrt(len2);
      best_lat = len > 0.0 ? (dx * (y - ay) - dy * (x - ax)) / len : 0.0;
    }
  }
  return {best_arc, best_lat};
}

double Polyline::distance_to(double x, double y) const
{
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const double ax = points_[i].first;
    const double ay = points_[i].second;
    const double dx = points_[i + 1].first - ax;
    const double dy = points_[i + 1].second - ay;
    const double len2 = dx * dx + dy * dy;
    const double u = len2 > 0.0 ? std::clamp(((x - ax) * dx + (y - ay) * dy) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, std::hypot(x - ax - u * dx, y - ay - u * dy));
  }
  return best;
}

// ---------------------------------------------------------------- simulator

namespace
{

constexpr double kRoadHalfLength = 70.0;
constexpr double kSampleStep = 0.5;
constexpr double kSensorRange = 40.0;
constexpr int kSubsteps = 4;
constexpr std::size_t kWarmupFrames = 80;

/// Centerline of a circular-arc (or straight) road through `origin`.
struct Road
{
  double x0 = 0.0;
  double y0 = 0.0;
  double heading = 0.0;
  double curvature = 0.0;
  double grade = 0.0;

  std::pair<double, double> center(double s) const
  {
    if (std::abs(curvature) < 1e-9) {
      return {x0 + s * std::cos(heading), y0 + s * std::sin(heading)};
    }
    const double th = heading + curvature * s;
    return {x0 + (std::sin(th) - std::sin(heading)) / curvature,
            y0 + (std::cos(heading) - std::cos(th)) / curvature};
  }
  std::pair<double, double> normal(double s) const
  {
    const double th = heading + curvature * s;
    return {-std::sin(th), std::cos(th)};
  }
  double height(double x, double y) const
  {
    return grade * ((x - x0) * std::cos(heading) + (y - y0) * std::sin(heading));
  }

  /// Path at lateral offset `offset(s)`, sampled in travel direction.
  template <typename Offset>
  Polyline path(bool forward, Offset offset) const
  {
    std::vector<std::pair<double, double>> pts;
    const auto n = static_cast<int>(std::lround(2.0 * kRoadHalfLength / kSampleStep));
    for (int k = 0; k <= n; ++k) {
      const double s = forward ? -kRoadHalfLength + k * kSampleStep : kRoadHalfLength - k * kSampleStep;
      const auto c = center(s);
      const auto nn = normal(s);
      const double d = offset(s);
      pts.emplace_back(c.first + d * nn.first, c.second + d * nn.second);
    }
    return Polyline(std::move(pts));
  }
};

struct ClassParams
{
  double radius;       // body radius for repulsion, meters
  double length;       // longitudinal extent for car following, meters
  double height;       // centroid above the road surface, meters
  double spawn_clear;  // min distance to others at spawn, meters
};

ClassParams params_of(AgentClass cls)
{
  switch (cls) {
    case AgentClass::Pedestrian:
      return {0.3, 0.5, 0.9, 1.0};
    case AgentClass::Rider:
      return {0.6, 1.8, 1.0, 3.0};
    case AgentClass::Vehicle:
      break;
  }
  return {1.5, 4.5, 0.8, 10.0};
}

struct Agent
{
  std::int64_t id = 0;
  AgentClass cls = AgentClass::Vehicle;
  Polyline path;
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double desired_speed = 0.0;
  // Vehicles: arc position and scalar speed along the route.
  double arc = 0.0;
  double speed = 0.0;
  // Vehicles: in-lane offset from the route (left positive), meters.
  double lateral = 0.0;
  // Pedestrians and riders: heading perturbation (radians), drawn from the
  // agent's own stream so other agents cannot shift it.
  double heading_noise = 0.0;
  Rng noise{0};
  bool done = false;
};

class Simulator
{
public:
  explicit Simulator(const SyntheticConfig & config) : config_(config), rng_(config.seed)
  {
    build_world();
  }

  SimulationTrace run()
  {
    SimulationTrace trace;
    trace.scene.scene_id = config_.scene_id;
    trace.scene.frame_period_s = config_.frame_period_s;
    for (std::size_t f = 0; f < kWarmupFrames + config_.n_frames; ++f) {
      spawn();
      for (int k = 0; k < kSubsteps; ++k) {
        step(config_.frame_period_s / kSubsteps);
      }
      std::erase_if(agents_, [](const Agent & a) { return a.done; });
      if (f >= kWarmupFrames) {
        trace.scene.frames.push_back(record(static_cast<std::int64_t>(f - kWarmupFrames)));
      }
    }
    for (auto & [id, route] : routes_) {
      trace.vehicle_routes.emplace(id, std::move(route));
    }
    return trace;
  }

private:
  struct Lane
  {
    Polyline path;
    bool forward;
    double offset;
    double speed;
  };

  void build_world()
  {
    road_.heading = rng_.uniform(-0.3, 0.3);
    road_.x0 = 0.0;
    road_.y0 = rng_.uniform(-4.0, 4.0);
    if (rng_.bernoulli(0.65)) {
      road_.curvature = (rng_.bernoulli(0.5) ? 1.0 : -1.0) * rng_.uniform(1.0 / 150.0, 1.0 / 50.0);
    }
    road_.grade = rng_.uniform(-0.04, 0.04);

    for (const double d : {-1.75, -5.25}) {
      lanes_.push_back({road_.path(true, [d](double) { return d; }), true, d, rng_.uniform(8.0, 13.0)});
    }
    for (const double d : {1.75, 5.25}) {
      lanes_.push_back({road_.path(false, [d](double) { return d; }), false, d, rng_.uniform(8.0, 13.0)});
    }
    bike_paths_.push_back(road_.path(true, [](double) { return -8.0; }));
    bike_paths_.push_back(road_.path(false, [](double) { return 8.0; }));
    sidewalks_.push_back(road_.path(true, [](double) { return -11.0; }));
    sidewalks_.push_back(road_.path(false, [](double) { return -11.0; }));
    sidewalks_.push_back(road_.path(true, [](double) { return 11.0; }));
    sidewalks_.push_back(road_.path(false, [](double) { return 11.0; }));
  }

  Polyline vehicle_route(std::size_t lane_index)
  {
    const Lane & lane = lanes_[lane_index];
    if (!rng_.bernoulli(0.35)) {
      return lane.path;
    }
    const double from = lane.offset;
    const double to = std::abs(from) < 3.0 ? from * 3.0 : from / 3.0;
    const double length = rng_.uniform(25.0, 45.0);
    // Arc position (in travel direction) where the change begins.
    const double start = rng_.uniform(20.0, 2.0 * kRoadHalfLength - length - 20.0);
    const bool forward = lane.forward;
    return road_.path(forward, [=](double s) {
      const double along = forward ? s + kRoadHalfLength : kRoadHalfLength - s;
      const double u = std::clamp((along - start) / length, 0.0, 1.0);
      return from + (to - from) * u * u * (3.0 - 2.0 * u);
    });
  }

  /// True when no agent is within `clearance` of (x, y); a new vehicle also
  /// needs `kVehicleHeadroom` to the nearest other vehicle.
  bool clear_at(double x, double y, AgentClass cls) const
  {
    constexpr double kVehicleHeadroom = 30.0;
    for (const auto & a : agents_) {
      const double d = std::hypot(a.x - x, a.y - y);
      if (d < params_of(cls).spawn_clear ||
          (cls == AgentClass::Vehicle && a.cls == AgentClass::Vehicle && d < kVehicleHeadroom)) {
        return false;
      }
    }
    return true;
  }

  void spawn()
  {
    const double rate = config_.density == Density::High ? 1.6 : 0.5;  // agents per second
    const auto & mix = config_.class_mix;
    const double total = mix.pedestrian + mix.vehicle + mix.rider;
    const std::pair<AgentClass, double> classes[] = {
      {AgentClass::Vehicle, mix.vehicle}, {AgentClass::Pedestrian, mix.pedestrian}, {AgentClass::Rider, mix.rider}};
    for (const auto & [cls, weight] : classes) {
      const double p = rate * weight / total * config_.frame_period_s;
      // Draw every time so the stream does not depend on the outcome.
      const bool fire = rng_.uniform() < p;
      Agent a = make_agent(cls);
      if (fire && clear_at(a.x, a.y, cls)) {
        a.id = next_id_++;
        if (cls == AgentClass::Vehicle) {
          routes_.emplace(a.id, a.path);
        }
        agents_.push_back(std::move(a));
      }
    }
  }

  Agent make_agent(AgentClass cls)
  {
    Agent a;
    a.cls = cls;
    a.noise = rng_.fork(static_cast<std::uint64_t>(cls));
    if (cls == AgentClass::Vehicle) {
      const auto lane = static_cast<std::size_t>(rng_.below(lanes_.size()));
      a.path = vehicle_route(lane);
      a.desired_speed = lanes_[lane].speed + rng_.uniform(-0.2, 0.2);
      a.speed = a.desired_speed;
      a.arc = 0.0;
    } else if (cls == AgentClass::Rider) {
      a.path = bike_paths_[static_cast<std::size_t>(rng_.below(bike_paths_.size()))];
      a.desired_speed = rng_.uniform(3.5, 6.0);
      a.arc = rng_.uniform(0.0, 0.5 * a.path.length());
    } else {
      a.path = sidewalks_[static_cast<std::size_t>(rng_.below(sidewalks_.size()))];
      a.arc = rng_.uniform(0.0, 0.9 * a.path.length());
      a.desired_speed = rng_.uniform(1.0, 1.6);
    }
    const auto p = a.path.at(a.arc);
    const auto t = a.path.tangent(a.arc);
    a.x = p.first;
    a.y = p.second;
    a.vx = a.desired_speed * t.first;
    a.vy = a.desired_speed * t.second;
    return a;
  }

  /// Intelligent-driver acceleration toward the nearest agent ahead in the
  /// vehicle's corridor.
  double car_following(const Agent & a) const
  {
    constexpr double kMaxAccel = 1.5;
    constexpr double kComfortDecel = 2.0;
    constexpr double kMinGap = 2.0;
    constexpr double kHeadway = 1.2;
    constexpr double kCorridor = 1.8;
    constexpr double kLookahead = 50.0;

    const double v = a.speed;
    double accel = kMaxAccel * (1.0 - std::pow(v / a.desired_speed, 4.0));
    for (const auto & o : agents_) {
      if (o.id == a.id || o.done || std::hypot(o.x - a.x, o.y - a.y) > kLookahead) {
        continue;
      }
      // Route-relative coordinates so curved lanes do not alias neighbors
      // on adjacent paths into the corridor.
      const auto [arc, lat] = a.path.project(o.x, o.y, a.arc, a.arc + kLookahead);
      const double lon = arc - a.arc;
      if (lon <= 0.0 || std::abs(lat) > kCorridor + params_of(o.cls).radius) {
        continue;
      }
      const auto t = a.path.tangent(arc);
      const double gap = std::max(0.1, lon - 0.5 * (params_of(a.cls).length + params_of(o.cls).length));
      const double v_lead = o.vx * t.first + o.vy * t.second;
      const double s_star =
        kMinGap + std::max(0.0, v * kHeadway + v * (v - v_lead) / (2.0 * std::sqrt(kMaxAccel * kComfortDecel)));
      const double candidate = kMaxAccel * (1.0 - std::pow(v / a.desired_speed, 4.0) - (s_star / gap) * (s_star / gap));
      accel = std::min(accel, candidate);
    }
    return std::max(accel, -8.0);
  }

  /// In-lane offset a vehicle drifts toward: away from agents beside it,
  /// capped so it stays inside its lane.
  double lateral_target(const Agent & a) const
  {
    constexpr double kMaxOffset = 0.8;
    constexpr double kAlongRange = 8.0;
    constexpr double kSideRange = 5.0;
    double push = 0.0;
    for (const auto & o : agents_) {
      if (o.id == a.id || o.done || std::hypot(o.x - a.x, o.y - a.y) > kAlongRange + kSideRange) {
        continue;
      }
      const auto [arc, lat] = a.path.project(o.x, o.y, a.arc - kAlongRange, a.arc + kAlongRange);
      const double side = lat - a.lateral;
      if (std::abs(arc - a.arc) > kAlongRange || std::abs(side) > kSideRange || std::abs(side) < 1e-6) {
        continue;
      }
      push -= (side > 0.0 ? 1.0 : -1.0) * std::exp(-(std::abs(side) - 2.0));
    }
    return std::clamp(0.5 * push, -kMaxOffset, kMaxOffset);
  }

  /// Social-force push away from nearby agents. The component along the
  /// walking direction (ux, uy) is damped so agents mostly sidestep.
  void repulsion(const Agent & a, double ux, double uy, double & fx, double & fy) const
  {
    constexpr double kAlongScale = 0.2;
    double rx = 0.0;
    double ry = 0.0;
    constexpr double kRange = 8.0;
    constexpr double kFalloff = 1.5;
    const double strength = a.cls == AgentClass::Pedestrian ? 6.0 : 3.0;
    for (const auto & o : agents_) {
      if (o.id == a.id || o.done) {
        continue;
      }
      const double dx = a.x - o.x;
      const double dy = a.y - o.y;
      const double d = std::hypot(dx, dy);
      if (d > kRange || d < 1e-6) {
        continue;
      }
      const double reach = params_of(a.cls).radius + params_of(o.cls).radius;
      const double mag = (o.cls == AgentClass::Vehicle ? 2.0 : 1.0) * strength * std::exp((reach - d) / kFalloff);
      rx += mag * dx / d;
      ry += mag * dy / d;
    }
    const double along = rx * ux + ry * uy;
    const double across = -rx * uy + ry * ux;
    fx += kAlongScale * along * ux - across * uy;
    fy += kAlongScale * along * uy + across * ux;
  }

  void step(double dt)
  {
    // Accelerations are computed from the state at the start of the substep.
    std::vector<std::pair<double, double>> accel(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      Agent & a = agents_[i];
      if (a.cls == AgentClass::Vehicle) {
        if (config_.interaction) {
          accel[i] = {car_following(a), lateral_target(a)};
        }
        continue;
      }
      const bool ped = a.cls == AgentClass::Pedestrian;
      const double persistence = ped ? 0.97 : 0.985;
      const double spread = ped ? 0.08 : 0.03;
      a.heading_noise = persistence * a.heading_noise + spread * a.noise.normal();

      const auto [arc, lat] = a.path.project(a.x, a.y);
      const auto t = a.path.tangent(std::min(arc + 1.0, a.path.length()));
      double dx = t.first + 0.4 * lat * t.second;
      double dy = t.second - 0.4 * lat * t.first;
      const double c = std::cos(a.heading_noise);
      const double s = std::sin(a.heading_noise);
      const double norm = std::hypot(dx, dy);
      dx /= norm;
      dy /= norm;
      const double ux = c * dx - s * dy;
      const double uy = s * dx + c * dy;
      const double relax = ped ? 0.5 : 0.8;
      double fx = (a.desired_speed * ux - a.vx) / relax;
      double fy = (a.desired_speed * uy - a.vy) / relax;
      if (config_.interaction) {
        repulsion(a, ux, uy, fx, fy);
      }
      accel[i] = {fx, fy};
      a.arc = arc;
    }

    for (std::size_t i = 0; i < agents_.size(); ++i) {
      Agent & a = agents_[i];
      if (a.cls == AgentClass::Vehicle) {
        a.speed = std::max(0.0, a.speed + accel[i].first * dt);
        a.arc += a.speed * dt;
        if (a.arc >= a.path.length()) {
          a.done = true;
          continue;
        }
        // Relax toward the target offset with a one-second time constant.
        const double drift = (accel[i].second - a.lateral) * std::min(1.0, dt);
        a.lateral += drift;
        const auto p = a.path.at(a.arc);
        const auto t = a.path.tangent(a.arc);
        a.x = p.first - a.lateral * t.second;
        a.y = p.second + a.lateral * t.first;
        a.vx = a.speed * t.first - drift / dt * t.second;
        a.vy = a.speed * t.second + drift / dt * t.first;
        continue;
      }
      a.vx += accel[i].first * dt;
      a.vy += accel[i].second * dt;
      const double cap = (a.cls == AgentClass::Pedestrian ? 2.0 : 1.5) * a.desired_speed;
      const double speed = std::hypot(a.vx, a.vy);
      if (speed > cap) {
        a.vx *= cap / speed;
        a.vy *= cap / speed;
      }
      a.x += a.vx * dt;
      a.y += a.vy * dt;
      if (a.arc >= a.path.length() - 0.5 || std::hypot(a.x, a.y) > 2.0 * kRoadHalfLength) {
        a.done = true;
      }
    }
  }

  Frame record(std::int64_t t)
  {
    Frame frame;
    frame.t = t;
    for (auto & a : agents_) {
      double x = a.x;
      double y = a.y;
      if (config_.position_noise_m > 0.0) {
        x += a.noise.normal(0.0, config_.position_noise_m);
        y += a.noise.normal(0.0, config_.position_noise_m);
      }
      if (std::hypot(a.x, a.y) > kSensorRange) {
        continue;
      }
      frame.agents.push_back(AgentObservation{a.id, a.cls, Vec3{x, y, road_.height(a.x, a.y) + params_of(a.cls).height}});
    }
    return frame;
  }

  SyntheticConfig config_;
  Rng rng_;
  Road road_;
  std::vector<Lane> lanes_;
  std::vector<Polyline> bike_paths_;
  std::vector<Polyline> sidewalks_;
  std::vector<Agent> agents_;
  std::map<std::int64_t, Polyline> routes_;
  std::int64_t next_id_ = 1;
};

}  // namespace

SimulationTrace simulate_scene(const SyntheticConfig & config)
{
  validate(config);
  return Simulator(config).run();
}

Scene generate_synthetic_scene(const SyntheticConfig & config)
{
  return simulate_scene(config).scene;
}

std::vector<Scene> generate_synthetic_corpus(const SyntheticConfig & config, std::size_t count)
{
  validate(config);
  Rng seeds(config.seed);
  std::vector<Scene> scenes;
  scenes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SyntheticConfig one = config;
    one.seed = seeds.next_u64();
    one.scene_id = config.scene_id + "-" + std::to_string(config.seed) + "-" + std::to_string(i);
    scenes.push_back(generate_synthetic_scene(one));
  }
  return scenes;
}

}  // namespace socialmask
