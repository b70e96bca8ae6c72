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

#include "lrfusion/pipeline.hpp"

#include <string>

#include "lrfusion/error.hpp"
#include "lrfusion/heuristic_fusion.hpp"
#include "lrfusion/rng.hpp"

namespace lrfusion {
namespace {

constexpr std::uint64_t kDetectorStream = 3;

}  // namespace

std::string_view to_string(FusionMode m) {
  switch (m) {
    case FusionMode::kLidarOnly: return "lidar_only";
    case FusionMode::kHeuristic: return "heuristic";
    case FusionMode::kAttention: return "attention";
  }
  return "lidar_only";
}

FusionMode fusion_mode_from_string(std::string_view s) {
  for (FusionMode m : {FusionMode::kLidarOnly, FusionMode::kHeuristic, FusionMode::kAttention}) {
    if (s == to_string(m)) return m;
  }
  throw Error(ErrorCode::kConfigInvalid,
              "unknown mode '" + std::string(s) + "' (expected lidar_only, heuristic or attention)");
}

std::vector<Detection> frame_detections(const Scene& scene, std::size_t frame_index,
                                        const DetectorNoiseConfig& det_cfg, std::uint64_t salt) {
  const Frame& frame = scene.frames.at(frame_index);
  if (frame.detections) return *frame.detections;
  return detect(frame.labels, det_cfg, derive_seed(scene.seed, {kDetectorStream, frame_index, salt}),
                frame.t);
}

std::vector<Detection> apply_fusion(FusionMode mode, std::span<const Detection> dets,
                                    std::span<const RadarTarget> radar, const FusionConfig& cfg,
                                    const nn::ParamStore* params) {
  switch (mode) {
    case FusionMode::kLidarOnly:
      return {dets.begin(), dets.end()};
    case FusionMode::kHeuristic:
      return heuristic_refine_frame(dets, radar, cfg);
    case FusionMode::kAttention:
      if (params == nullptr) {
        throw Error(ErrorCode::kCheckpointMissing, "attention fusion needs trained parameters");
      }
      return refine_frame(dets, radar, *params, cfg);
  }
  return {dets.begin(), dets.end()};
}

std::vector<EvalFrame> build_eval_frames(std::span<const Scene> scenes, FusionMode mode,
                                         const DetectorNoiseConfig& det_cfg,
                                         const FusionConfig& fusion_cfg,
                                         const nn::ParamStore* params, std::uint64_t salt) {
  std::vector<EvalFrame> out;
  for (const Scene& scene : scenes) {
    for (std::size_t f = 0; f < scene.frames.size(); ++f) {
      const auto dets = frame_detections(scene, f, det_cfg, salt);
      EvalFrame ef;
      ef.dets = apply_fusion(mode, dets, scene.frames[f].radar, fusion_cfg, params);
      ef.labels = scene.frames[f].labels;
      out.push_back(std::move(ef));
    }
  }
  return out;
}

}  // namespace lrfusion
