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

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lrfusion/scene_sim.hpp"

namespace lrfusion {

// A dataset file holds one JSON document per line, one per scene:
// {"config": <sim config>, "seed": n, "frames": [...]}.
struct Dataset {
  SimConfig sim;
  std::vector<Scene> scenes;
};

std::string scene_to_json(const Scene& scene, const SimConfig& sim);

/// Parses one scene document; the embedded config is stored into `sim` when
/// non-null. Throws Error(kIoFailure) on malformed input.
Scene scene_from_json(std::string_view line, SimConfig* sim = nullptr);

void write_dataset(std::ostream& out, std::span<const Scene> scenes, const SimConfig& sim);
void write_dataset(const std::filesystem::path& path, std::span<const Scene> scenes,
                   const SimConfig& sim);

Dataset read_dataset(std::istream& in);
/// Throws Error(kIoFailure) when the file is missing or malformed.
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace lrfusion
