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
#include <span>
#include <string_view>
#include <vector>

#include "lrfusion/detector_stub.hpp"
#include "lrfusion/eval_metrics.hpp"
#include "lrfusion/late_fusion.hpp"
#include "lrfusion/nn/autodiff.hpp"
#include "lrfusion/scene_sim.hpp"

namespace lrfusion {

enum class FusionMode { kLidarOnly, kHeuristic, kAttention };

std::string_view to_string(FusionMode m);

/// Parses "lidar_only", "heuristic" or "attention". Throws
/// Error(kConfigInvalid) otherwise.
FusionMode fusion_mode_from_string(std::string_view s);

/// Stored detections of a frame when present, otherwise the detector stub
/// run on the frame's labels with a seed derived from the scene seed, the
/// frame index and `salt`.
std::vector<Detection> frame_detections(const Scene& scene, std::size_t frame_index,
                                        const DetectorNoiseConfig& det_cfg, std::uint64_t salt = 0);

/// Velocity refinement of one frame. `params` is required for kAttention.
std::vector<Detection> apply_fusion(FusionMode mode, std::span<const Detection> dets,
                                    std::span<const RadarTarget> radar, const FusionConfig& cfg,
                                    const nn::ParamStore* params);

/// Detections after fusion paired with labels, one entry per frame.
std::vector<EvalFrame> build_eval_frames(std::span<const Scene> scenes, FusionMode mode,
                                         const DetectorNoiseConfig& det_cfg,
                                         const FusionConfig& fusion_cfg,
                                         const nn::ParamStore* params, std::uint64_t salt = 0);

}  // namespace lrfusion
