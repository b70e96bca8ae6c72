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

#include "lrfusion/geometry.hpp"

#include <algorithm>

#include "lrfusion/error.hpp"

namespace lrfusion {

Vec2 radial_unit(const Vec2& p) {
  const double n = norm(p);
  if (!(n > kGeomEps)) {
    throw Error(ErrorCode::kPositionAtOrigin, "position is at the sensor origin");
  }
  return p / n;
}

double cos_angle(const Vec2& a, const Vec2& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (!(na > kGeomEps) || !(nb > kGeomEps)) {
    throw Error(ErrorCode::kZeroVector, "angle undefined for a zero vector");
  }
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double wrap_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

}  // namespace lrfusion
