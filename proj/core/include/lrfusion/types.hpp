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

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "lrfusion/geometry.hpp"

namespace lrfusion {

enum class ObjectClass { kCar, kMotorcycle };

std::string_view to_string(ObjectClass cls);
std::optional<ObjectClass> object_class_from_string(std::string_view name);

// LiDAR return in the ego frame.
struct LidarPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double t = 0.0;  // capture timestamp, s
};

// Mid-level radar cluster. v_par is the ego-motion compensated radial
// velocity, positive when the target recedes from the ego origin.
struct RadarTarget {
  Vec2 q;
  double v_par = 0.0;
  bool moving = false;
  double t = 0.0;
};

// Oriented BEV rectangle; w is measured across the heading, l along it.
struct BevBox {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double l = 1.0;
  double theta = 0.0;
};

// Corners in counter-clockwise order.
std::array<Vec2, 4> box_corners(const BevBox& box);

struct Detection {
  double c = 1.0;  // confidence
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double l = 1.0;
  double theta = 0.0;
  Vec2 v;
  double p_moving = 0.0;
  ObjectClass cls = ObjectClass::kCar;
  double t = 0.0;  // frame timestamp the detection refers to

  Vec2 center() const { return {x, y}; }
  BevBox box() const { return {x, y, w, l, theta}; }
};

struct BoxLabel {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double l = 1.0;
  double theta = 0.0;
  Vec2 v;
  bool is_dynamic = false;
  std::uint64_t actor_id = 0;
  ObjectClass cls = ObjectClass::kCar;
  // Observations of this actor within the accumulation window.
  int num_lidar_points = 0;
  int num_radar_points = 0;

  Vec2 center() const { return {x, y}; }
  BevBox box() const { return {x, y, w, l, theta}; }
};

}  // namespace lrfusion
