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
#include <vector>

#include "lrfusion/types.hpp"
#include "lrfusion/voxelizer.hpp"

namespace lrfusion::testing {

/// AP from an explicit precision/recall enumeration: for every prefix of the
/// confidence ranking the matching is recomputed from scratch.
double brute_force_ap(std::span<const Detection> dets, std::span<const BoxLabel> labels,
                      double threshold);

/// IoU estimated by uniform sampling over the joint bounding rectangle.
double monte_carlo_iou(const BevBox& a, const BevBox& b, int samples, std::uint64_t seed);

/// LiDAR occupancy by visiting every voxel for every point; values in the
/// same channel-major layout as VoxelGrid.
std::vector<double> brute_force_lidar(std::span<const LidarPoint> points, const VoxelConfig& cfg,
                                      double t_ref);

}  // namespace lrfusion::testing
