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

#include <span>
#include <vector>

#include "lrfusion/late_fusion.hpp"
#include "lrfusion/types.hpp"

namespace lrfusion {

// Quantities tested by the association rules.
struct HeuristicRuleInputs {
  double distance = 0.0;   // m, detection center to radar target
  double gamma_deg = 0.0;  // motion vs. radial direction, folded to [0, 90]
  double speed = 0.0;      // m/s, detection speed
  double v_bp = 0.0;       // m/s, back-projected target velocity
};

/// distance < 3 m, gamma < 40 deg, speed > 1 m/s and v_bp < 30 m/s, all strict.
bool heuristic_rules_pass(const HeuristicRuleInputs& in);

/// Rule inputs of one pair. Requires a moving detection and a moving target.
HeuristicRuleInputs heuristic_rule_inputs(const Detection& d, const RadarTarget& q);

/// True iff `q` is moving and the pair passes all rules. A detection without
/// a motion direction is never associated.
bool rule_associate(const Detection& d, const RadarTarget& q);

/// Median; the mean of the two middle values for even sizes. Empty input
/// returns 0.
double median(std::vector<double> values);

/// Averages the detection speed with the median back-projected velocity of
/// all associated targets, keeping the direction. Without associations the
/// detection is returned unchanged.
Detection heuristic_refine(const Detection& d, std::span<const RadarTarget> targets);

/// heuristic_refine over one frame, restricted to radar targets inside the
/// accumulation window.
std::vector<Detection> heuristic_refine_frame(std::span<const Detection> dets,
                                              std::span<const RadarTarget> targets,
                                              const FusionConfig& cfg);

}  // namespace lrfusion
