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

#include "lrfusion/heuristic_fusion.hpp"

#include <algorithm>
#include <cmath>

#include "lrfusion/geometry.hpp"

namespace lrfusion {
namespace {

constexpr double kMaxDistance = 3.0;
constexpr double kMaxGammaDeg = 40.0;
constexpr double kMinSpeed = 1.0;
constexpr double kMaxBackProjected = 30.0;

}  // namespace

bool heuristic_rules_pass(const HeuristicRuleInputs& in) {
  return in.distance < kMaxDistance && in.gamma_deg < kMaxGammaDeg && in.speed > kMinSpeed &&
         in.v_bp < kMaxBackProjected;
}

HeuristicRuleInputs heuristic_rule_inputs(const Detection& d, const RadarTarget& q) {
  const PairFeature f = pair_feature(d, q);
  HeuristicRuleInputs in;
  in.distance = norm(q.q - d.center());
  in.gamma_deg = rad_to_deg(std::acos(std::min(1.0, std::abs(f.det[5]))));
  in.speed = f.det[2];
  in.v_bp = f.det_radar[3];
  return in;
}

bool rule_associate(const Detection& d, const RadarTarget& q) {
  if (!q.moving || !(norm(d.v) > 0.1)) return false;
  if (norm(d.center()) <= kGeomEps || norm(q.q) <= kGeomEps) return false;
  return heuristic_rules_pass(heuristic_rule_inputs(d, q));
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

Detection heuristic_refine(const Detection& d, std::span<const RadarTarget> targets) {
  std::vector<double> aligned;
  for (const RadarTarget& q : targets) {
    if (rule_associate(d, q)) aligned.push_back(heuristic_rule_inputs(d, q).v_bp);
  }
  if (aligned.empty()) return d;
  const double speed = norm(d.v);
  const double magnitude = std::max(0.0, (speed + median(std::move(aligned))) / 2.0);
  Detection out = d;
  out.v = (d.v / speed) * magnitude;
  return out;
}

std::vector<Detection> heuristic_refine_frame(std::span<const Detection> dets,
                                              std::span<const RadarTarget> targets,
                                              const FusionConfig& cfg) {
  cfg.validate();
  std::vector<Detection> out;
  out.reserve(dets.size());
  for (const Detection& d : dets) {
    std::vector<RadarTarget> in_window;
    for (const RadarTarget& q : targets) {
      const double age = d.t - q.t;
      if (age >= -1e-9 && age < cfg.window) in_window.push_back(q);
    }
    out.push_back(heuristic_refine(d, in_window));
  }
  return out;
}

}  // namespace lrfusion
