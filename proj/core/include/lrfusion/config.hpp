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
#include <filesystem>
#include <string>
#include <string_view>

#include "lrfusion/detector_stub.hpp"
#include "lrfusion/eval_metrics.hpp"
#include "lrfusion/late_fusion.hpp"
#include "lrfusion/scene_sim.hpp"
#include "lrfusion/training.hpp"
#include "lrfusion/voxelizer.hpp"

namespace lrfusion {

// The full run configuration: one JSON document with sections
// {sim, detector, voxel, fusion, train, eval}.
struct Config {
  SimConfig sim;
  DetectorNoiseConfig detector;
  VoxelConfig voxel;
  FusionConfig fusion;
  TrainConfig train;
  EvalConfig eval;

  void validate() const;
};

/// Strict parse: every field is required and unknown keys are rejected.
/// Errors are Error(kConfigInvalid) naming the offending "section.field".
Config parse_config(std::string_view text);

/// parse_config on a file. An unreadable file is also kConfigInvalid.
Config load_config(const std::filesystem::path& path);

std::string config_to_json(const Config& cfg, int indent = 2);

/// FNV-1a 64 of the compact JSON form.
std::uint64_t config_hash(const Config& cfg);

/// Hex rendering of a hash, 16 digits.
std::string hash_hex(std::uint64_t h);

}  // namespace lrfusion
