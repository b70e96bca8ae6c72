/******************************************************************************
 * Copyright 2026 The lrfusion Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#include "lrfusion/scene_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "lrfusion/error.hpp"
#include "lrfusion/rng.hpp"

namespace lrfusion {
namespace {

// Radar reports a target as moving above this speed.
constexpr double kRadarMovingSpeed = 0.5;
constexpr double kMaxRadialSpeed = 70.0;
constexpr double kClutterSpeed = 30.0;

enum Stream : std::uint64_t { kActors = 0, kLidar = 1, kRadar = 2 };

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kConfigInvalid, what);
}

class Gaussian {
 public:
  explicit Gaussian(Rng& rng) : rng_(rng) {}
  // Always consumes a draw so the stream layout does not depend on sigma.
  double operator()(double sigma) { return sigma * unit_(rng_); }

 private:
  Rng& rng_;
  std::normal_distribution<double> unit_{0.0, 1.0};
};

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec2 perimeter_point(const BoxLabel& label, double u) {
  // u in [0, 2(w+l)) walks the rectangle edges in box coordinates.
  const double hl = label.l / 2;
  const double hw = label.w / 2;
  Vec2 local;
  if (u < label.l) {
    local = {-hl + u, -hw};
  } else if (u < label.l + label.w) {
    local = {hl, -hw + (u - label.l)};
  } else if (u < 2 * label.l + label.w) {
    local = {hl - (u - label.l - label.w), hw};
  } else {
    local = {-hl, hw - (u - 2 * label.l - label.w)};
  }
  return label.center() + rotate(local, label.theta);
}

std::vector<LidarPoint> sample_lidar_impl(const std::vector<BoxLabel>& labels,
                                          const SensorNoiseConfig& cfg,
                                          std::uint64_t seed, double t,
                                          std::vector<int>* per_label) {
  Rng rng = make_rng(seed);
  Gaussian gauss(rng);
  std::vector<LidarPoint> points;
  if (per_label) per_label->assign(labels.size(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const BoxLabel& label = labels[i];
    const double range = norm(label.center());
    if (range > cfg.max_range_lidar || range <= kGeomEps) continue;
    const int count = lidar_point_count(range, cfg.lidar_density_at_10m);
    const double perimeter = 2.0 * (label.w + label.l);
    const double height = label.cls == ObjectClass::kCar ? 1.5 : 1.2;
    for (int k = 0; k < count; ++k) {
      Vec2 p = perimeter_point(label, uniform(rng, 0.0, perimeter));
      const double z = uniform(rng, 0.2, height);
      const double dr = gauss(cfg.lidar_range_sigma);
      if (norm(p) > kGeomEps) p = p + radial_unit(p) * dr;
      points.push_back({p.x, p.y, z, t});
    }
    if (per_label) (*per_label)[i] = count;
  }
  return points;
}

std::vector<RadarTarget> sample_radar_impl(const std::vector<BoxLabel>& labels,
                                           const SensorNoiseConfig& cfg,
                                           std::uint64_t seed, double t,
                                           std::vector<int>* per_label) {
  Rng rng = make_rng(seed);
  Gaussian gauss(rng);
  std::bernoulli_distribution detected(cfg.radar_detection_prob);
  std::vector<RadarTarget> targets;
  if (per_label) per_label->assign(labels.size(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const BoxLabel& label = labels[i];
    const Vec2 center = label.center();
    const double range = norm(center);
    if (range > cfg.max_range_radar || range <= kGeomEps) continue;
    if (!detected(rng)) continue;
    const double frac = std::min(1.0, range / cfg.max_range_radar);
    const double pos_sigma =
        cfg.radar_pos_sigma_near + (cfg.radar_pos_sigma_far - cfg.radar_pos_sigma_near) * frac;
    RadarTarget q;
    const double nx = gauss(pos_sigma);
    const double ny = gauss(pos_sigma);
    q.q = center + Vec2{nx, ny};
    q.v_par = dot(label.v, radial_unit(center)) + gauss(cfg.radar_vel_sigma);
    q.v_par = std::clamp(q.v_par, -kMaxRadialSpeed, kMaxRadialSpeed);
    q.moving = norm(label.v) > kRadarMovingSpeed;
    q.t = t;
    targets.push_back(q);
    if (per_label) (*per_label)[i] += 1;
  }
  if (cfg.radar_false_positive_rate > 0.0) {
    const int n_clutter =
        std::poisson_distribution<int>(cfg.radar_false_positive_rate)(rng);
    std::bernoulli_distribution coin(0.5);
    for (int k = 0; k < n_clutter; ++k) {
      const double r = std::max(1.0, cfg.clutter_range * std::sqrt(uniform(rng, 0.0, 1.0)));
      const double a = uniform(rng, -std::numbers::pi, std::numbers::pi);
      RadarTarget q;
      q.q = {r * std::cos(a), r * std::sin(a)};
      q.moving = coin(rng);
      q.v_par = uniform(rng, -kClutterSpeed, kClutterSpeed);
      q.t = t;
      targets.push_back(q);
    }
  }
  return targets;
}

BoxLabel label_from_state(const ActorState& s, std::uint64_t id) {
  BoxLabel label;
  label.x = s.pose.x;
  label.y = s.pose.y;
  label.w = s.w;
  label.l = s.l;
  label.theta = s.pose.theta;
  label.v = {s.speed * std::cos(s.pose.theta), s.speed * std::sin(s.pose.theta)};
  label.is_dynamic = s.speed > 0.0;
  label.actor_id = id;
  label.cls = s.cls;
  return label;
}

ActorState sample_actor(const SimConfig& cfg, Rng& rng) {
  ActorState s;
  const bool moto = std::bernoulli_distribution(cfg.motorcycle_fraction)(rng);
  if (moto) {
    s.cls = ObjectClass::kMotorcycle;
    s.w = uniform(rng, 0.7, 0.9);
    s.l = uniform(rng, 1.9, 2.3);
    s.wheelbase = 0.65 * s.l;
  } else {
    s.cls = ObjectClass::kCar;
    s.w = uniform(rng, 1.7, 2.1);
    s.l = uniform(rng, 4.0, 5.0);
    s.wheelbase = 0.6 * s.l;
  }
  const double range = uniform(rng, cfg.min_range, cfg.max_range);
  const double bearing = uniform(rng, -std::numbers::pi, std::numbers::pi);
  s.pose = {range * std::cos(bearing), range * std::sin(bearing),
            uniform(rng, -std::numbers::pi, std::numbers::pi)};
  if (std::bernoulli_distribution(cfg.dynamic_fraction)(rng)) {
    s.speed = uniform(rng, cfg.min_speed, cfg.max_speed);
    s.steering_angle = uniform(rng, -cfg.max_steering, cfg.max_steering);
  }
  return s;
}

}  // namespace

void SensorNoiseConfig::validate() const {
  require(lidar_range_sigma >= 0, "sim.noise.lidar_range_sigma must be >= 0");
  require(radar_pos_sigma_near >= 0, "sim.noise.radar_pos_sigma_near must be >= 0");
  require(radar_pos_sigma_far >= 0, "sim.noise.radar_pos_sigma_far must be >= 0");
  require(radar_vel_sigma >= 0, "sim.noise.radar_vel_sigma must be >= 0");
  require(radar_detection_prob >= 0 && radar_detection_prob <= 1,
          "sim.noise.radar_detection_prob must be in [0, 1]");
  require(radar_false_positive_rate >= 0, "sim.noise.radar_false_positive_rate must be >= 0");
  require(lidar_density_at_10m >= 0, "sim.noise.lidar_density_at_10m must be >= 0");
  require(max_range_lidar > 0, "sim.noise.max_range_lidar must be > 0");
  require(max_range_radar > 0, "sim.noise.max_range_radar must be > 0");
  require(clutter_range > 0, "sim.noise.clutter_range must be > 0");
}

void SimConfig::validate() const {
  require(n_scenes >= 0, "sim.n_scenes must be >= 0");
  require(n_frames >= 1, "sim.n_frames must be >= 1");
  require(sweep_interval > 0, "sim.sweep_interval must be > 0");
  require(frame_interval > 0, "sim.frame_interval must be > 0");
  const double ratio = frame_interval / sweep_interval;
  require(std::abs(ratio - std::round(ratio)) < 1e-9 && std::round(ratio) >= 1,
          "sim.frame_interval must be a whole multiple of sim.sweep_interval");
  require(n_sweeps >= 1, "sim.n_sweeps must be >= 1");
  require(n_radar_cycles >= 1, "sim.n_radar_cycles must be >= 1");
  require(min_actors >= 0 && max_actors >= min_actors,
          "sim.min_actors/max_actors must satisfy 0 <= min <= max");
  require(min_range > 0 && max_range >= min_range,
          "sim.min_range/max_range must satisfy 0 < min <= max");
  require(dynamic_fraction >= 0 && dynamic_fraction <= 1,
          "sim.dynamic_fraction must be in [0, 1]");
  require(motorcycle_fraction >= 0 && motorcycle_fraction <= 1,
          "sim.motorcycle_fraction must be in [0, 1]");
  require(min_speed > 0 && max_speed >= min_speed,
          "sim.min_speed/max_speed must satisfy 0 < min <= max");
  require(max_steering >= 0 && max_steering < std::numbers::pi / 2,
          "sim.max_steering must be in [0, pi/2)");
  noise.validate();
}

ActorState step_actor(const ActorState& s, double dt) {
  ActorState next = s;
  next.pose.x = s.pose.x + s.speed * std::cos(s.pose.theta) * dt;
  next.pose.y = s.pose.y + s.speed * std::sin(s.pose.theta) * dt;
  next.pose.theta =
      wrap_angle(s.pose.theta + (s.speed / s.wheelbase) * std::tan(s.steering_angle) * dt);
  return next;
}

int lidar_point_count(double range, double density_at_10m) {
  if (range <= kGeomEps) return 0;
  const double ratio = 10.0 / range;
  return static_cast<int>(std::lround(density_at_10m * ratio * ratio));
}

std::vector<LidarPoint> sample_lidar(const std::vector<BoxLabel>& labels,
                                     const SensorNoiseConfig& cfg, std::uint64_t seed,
                                     double t) {
  return sample_lidar_impl(labels, cfg, seed, t, nullptr);
}

std::vector<RadarTarget> sample_radar(const std::vector<BoxLabel>& labels,
                                      const SensorNoiseConfig& cfg, std::uint64_t seed,
                                      double t) {
  return sample_radar_impl(labels, cfg, seed, t, nullptr);
}

Scene generate_scene(const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng = make_rng(derive_seed(seed, {kActors}));

  const int ticks_per_frame =
      static_cast<int>(std::lround(cfg.frame_interval / cfg.sweep_interval));
  const int history = std::max(cfg.n_sweeps, cfg.n_radar_cycles) - 1;
  const int n_ticks = history + (cfg.n_frames - 1) * ticks_per_frame + 1;

  const int n_actors = std::uniform_int_distribution<int>(cfg.min_actors, cfg.max_actors)(rng);
  // trajectories[a][k] is actor a at tick k.
  std::vector<std::vector<ActorState>> trajectories;
  for (int a = 0; a < n_actors; ++a) {
    for (int attempt = 0; attempt < 50; ++attempt) {
      std::vector<ActorState> traj{sample_actor(cfg, rng)};
      for (int k = 1; k < n_ticks; ++k) traj.push_back(step_actor(traj.back(), cfg.sweep_interval));
      bool ok = true;
      for (const ActorState& s : traj) {
        if (std::hypot(s.pose.x, s.pose.y) < 3.0) ok = false;
      }
      for (const auto& other : trajectories) {
        const Vec2 d{other[0].pose.x - traj[0].pose.x, other[0].pose.y - traj[0].pose.y};
        if (norm(d) < 6.0) ok = false;
      }
      if (ok) {
        trajectories.push_back(std::move(traj));
        break;
      }
    }
  }

  auto labels_at = [&](int tick) {
    std::vector<BoxLabel> labels;
    for (std::size_t a = 0; a < trajectories.size(); ++a) {
      labels.push_back(label_from_state(trajectories[a][tick], a));
    }
    return labels;
  };

  Scene scene;
  scene.seed = seed;
  for (int f = 0; f < cfg.n_frames; ++f) {
    const int tick = history + f * ticks_per_frame;
    Frame frame;
    frame.t = tick * cfg.sweep_interval;
    frame.labels = labels_at(tick);
    std::vector<int> counts;
    for (int s = 0; s < cfg.n_sweeps; ++s) {
      const int k = tick - s;
      auto pts = sample_lidar_impl(labels_at(k), cfg.noise,
                                   derive_seed(seed, {kLidar, std::uint64_t(f), std::uint64_t(s)}),
                                   k * cfg.sweep_interval, &counts);
      for (std::size_t i = 0; i < counts.size(); ++i) frame.labels[i].num_lidar_points += counts[i];
      if (cfg.keep_points) frame.lidar.insert(frame.lidar.end(), pts.begin(), pts.end());
    }
    for (int c = 0; c < cfg.n_radar_cycles; ++c) {
      const int k = tick - c;
      auto targets = sample_radar_impl(
          labels_at(k), cfg.noise, derive_seed(seed, {kRadar, std::uint64_t(f), std::uint64_t(c)}),
          k * cfg.sweep_interval, &counts);
      for (std::size_t i = 0; i < counts.size(); ++i) frame.labels[i].num_radar_points += counts[i];
      frame.radar.insert(frame.radar.end(), targets.begin(), targets.end());
    }
    scene.frames.push_back(std::move(frame));
  }
  return scene;
}

std::vector<Scene> generate_dataset(const SimConfig& cfg, std::uint64_t seed) {
  std::vector<Scene> scenes;
  scenes.reserve(static_cast<std::size_t>(cfg.n_scenes));
  for (int i = 0; i < cfg.n_scenes; ++i) {
    scenes.push_back(generate_scene(cfg, derive_seed(seed, {std::uint64_t(i)})));
  }
  return scenes;
}

}  // namespace lrfusion
