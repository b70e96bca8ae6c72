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

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lrfusion/types.hpp"

namespace lrfusion {

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

// Kinematic bicycle state, referenced at the rear axle.
struct ActorState {
  Pose2 pose;
  double speed = 0.0;           // m/s, >= 0
  double steering_angle = 0.0;  // rad, |.| < pi/2
  double wheelbase = 2.7;       // m
  double w = 1.9;
  double l = 4.5;
  ObjectClass cls = ObjectClass::kCar;
};

// Defaults follow typical automotive LiDAR/radar datasheet magnitudes
// (2 cm LiDAR ranging, 10 cm / 40 cm radar near/far, 0.1 km/h Doppler).
struct SensorNoiseConfig {
  double lidar_range_sigma = 0.02;
  double radar_pos_sigma_near = 0.1;
  double radar_pos_sigma_far = 0.4;
  double radar_vel_sigma = 0.1 / 3.6;
  double radar_detection_prob = 0.9;
  double radar_false_positive_rate = 2.0;  // expected clutter targets per cycle
  double lidar_density_at_10m = 200.0;     // points per actor per sweep at 10 m
  double max_range_lidar = 100.0;
  double max_range_radar = 250.0;
  double clutter_range = 60.0;  // clutter is spread uniformly over this disc

  void validate() const;
};

struct SimConfig {
  int n_scenes = 10;
  int n_frames = 4;
  double frame_interval = 0.5;  // s between annotated frames
  double sweep_interval = 0.1;  // LiDAR sweep and radar cycle period, s
  int n_sweeps = 5;
  int n_radar_cycles = 5;
  int min_actors = 6;
  int max_actors = 16;
  double min_range = 8.0;
  double max_range = 60.0;
  double dynamic_fraction = 0.7;
  double motorcycle_fraction = 0.2;
  double min_speed = 2.0;
  double max_speed = 20.0;
  double max_steering = 0.1;
  bool keep_points = true;  // when false only per-label point counts are kept
  SensorNoiseConfig noise;

  void validate() const;
};

struct Frame {
  double t = 0.0;
  std::vector<BoxLabel> labels;
  std::vector<LidarPoint> lidar;   // all sweeps in the window, tagged by t
  std::vector<RadarTarget> radar;  // all cycles in the window, tagged by t
  std::optional<std::vector<Detection>> detections;
  std::optional<std::vector<Detection>> refined;
};

struct Scene {
  std::uint64_t seed = 0;
  std::vector<Frame> frames;
};

/// Advances a kinematic bicycle by one explicit Euler step of `dt` seconds.
ActorState step_actor(const ActorState& s, double dt);

/// Samples LiDAR returns on the perimeter of every label within
/// max_range_lidar. The per-actor count is
/// round(lidar_density_at_10m * (10 / range)^2), with Gaussian range noise.
std::vector<LidarPoint> sample_lidar(const std::vector<BoxLabel>& labels,
                                     const SensorNoiseConfig& cfg, std::uint64_t seed,
                                     double t = 0.0);

/// Emits at most one radar target per label (with radar_detection_prob) plus
/// Poisson clutter. Radial velocity is v . radial_unit(center) + noise.
std::vector<RadarTarget> sample_radar(const std::vector<BoxLabel>& labels,
                                      const SensorNoiseConfig& cfg, std::uint64_t seed,
                                      double t = 0.0);

/// Number of LiDAR points sampled for an actor at `range` meters.
int lidar_point_count(double range, double density_at_10m);

Scene generate_scene(const SimConfig& cfg, std::uint64_t seed);

/// Scene i is generated with derive_seed(seed, {i}).
std::vector<Scene> generate_dataset(const SimConfig& cfg, std::uint64_t seed);

}  // namespace lrfusion
