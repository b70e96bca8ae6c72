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

#include "lrfusion/types.hpp"

#include <cmath>

namespace lrfusion {

std::string_view to_string(ObjectClass cls) {
  switch (cls) {
    case ObjectClass::kCar: return "car";
    case ObjectClass::kMotorcycle: return "motorcycle";
  }
  return "car";
}

std::optional<ObjectClass> object_class_from_string(std::string_view name) {
  if (name == "car") return ObjectClass::kCar;
  if (name == "motorcycle") return ObjectClass::kMotorcycle;
  return std::nullopt;
}

std::array<Vec2, 4> box_corners(const BevBox& box) {
  const Vec2 along{std::cos(box.theta) * box.l / 2, std::sin(box.theta) * box.l / 2};
  const Vec2 across{-std::sin(box.theta) * box.w / 2, std::cos(box.theta) * box.w / 2};
  const Vec2 c{box.x, box.y};
  return {c + along - across, c + along + across, c - along + across, c - along - across};
}

}  // namespace lrfusion
