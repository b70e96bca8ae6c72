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
#include <span>
#include <vector>

#include "lrfusion/types.hpp"

namespace lrfusion {

// Corruption model standing in for a learned detector.
struct DetectorNoiseConfig {
  double pos_sigma = 0.2;           // m, per axis
  double size_sigma = 0.1;          // m, on w and l
  double heading_sigma = 0.05;      // rad
  double vel_mag_sigma = 1.5;       // m/s, additive, magnitude floored at 0
  double vel_dir_sigma = 0.05;      // rad, rotation of the true velocity
  double drop_prob = 0.05;
  double fp_rate = 0.5;             // expected false positives per frame
  double moving_prob_noise = 0.2;   // max pull of p_moving towards the wrong class
  double confidence_spread = 0.3;   // true positives score in [1 - spread, 1]
  double fp_max_confidence = 0.6;   // false positives score in [0, max]
  double fp_range = 60.0;           // false positives fall within this disc

  void validate() const;
};

/// Corrupts ground-truth labels into detections. Velocity is zeroed whenever
/// p_moving < 0.5. Deterministic in `seed`.
std::vector<Detection> detect(std::span<const BoxLabel> labels, const DetectorNoiseConfig& cfg,
                              std::uint64_t seed, double t = 0.0);

struct LabelMatch {
  std::size_t det = 0;
  std::optional<std::size_t> label;
  double distance = 0.0;  // BEV center distance when matched
};

/// Greedy one-to-one matching in descending confidence order (ties by
/// index); each detection takes the nearest unmatched label whose BEV center
/// lies within `dist_threshold` (inclusive). Returned in detection order.
std::vector<LabelMatch> match_to_labels(std::span<const Detection> dets,
                                        std::span<const BoxLabel> labels,
                                        double dist_threshold);

}  // namespace lrfusion
