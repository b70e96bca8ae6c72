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

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lrfusion/types.hpp"

namespace lrfusion {

// BEV voxelization geometry. Cells are half-open [lo, hi) on every axis;
// rows index y and columns index x.
struct VoxelConfig {
  double dx = 0.125;
  double dy = 0.125;
  double dz = 0.2;
  double x_min = -16.0;
  double x_max = 16.0;
  double y_min = -16.0;
  double y_max = 16.0;
  double z_min = -1.0;
  double z_max = 2.0;
  int n_sweeps = 5;
  int n_radar_cycles = 5;
  double sweep_interval = 0.1;  // assigns timestamps to sweep/cycle channels

  int width() const;   // cells along x
  int height() const;  // cells along y
  int slices() const;  // cells along z
  void validate() const;
};

enum class Sensor { kLidar, kRadar };

struct ChannelInfo {
  Sensor sensor = Sensor::kLidar;
  int frame = 0;  // sweep index (LiDAR) or cycle index (radar); 0 = newest
  int slice = 0;  // height slice, LiDAR only

  bool operator==(const ChannelInfo&) const = default;
};

class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(int height, int width, std::vector<ChannelInfo> layout);

  int channels() const { return static_cast<int>(layout_.size()); }
  int height() const { return height_; }
  int width() const { return width_; }
  const std::vector<ChannelInfo>& layout() const { return layout_; }

  double& at(int c, int row, int col) { return values_[index(c, row, col)]; }
  double at(int c, int row, int col) const { return values_[index(c, row, col)]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Copy of the channels [first, first + count).
  VoxelGrid channel_range(int first, int count) const;

  bool operator==(const VoxelGrid&) const = default;

 private:
  std::size_t index(int c, int row, int col) const {
    return (static_cast<std::size_t>(c) * height_ + row) * width_ + col;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<ChannelInfo> layout_;
  std::vector<double> values_;
};

/// Weighted-occupancy LiDAR channels (sweep-major, slice-minor). Each point
/// adds the product of its per-axis tent weights to the voxel containing it.
/// Points outside the extents or the sweep window are dropped.
VoxelGrid lidar_occupancy(std::span<const LidarPoint> points, const VoxelConfig& cfg,
                          double t_ref = 0.0);

/// Motion-aware radar channels, one BEV image per cycle: +1 if any moving
/// target falls in the cell, -1 if only static ones do, 0 if empty.
VoxelGrid radar_occupancy(std::span<const RadarTarget> targets, const VoxelConfig& cfg,
                          double t_ref = 0.0);

/// Channel-wise concatenation. Throws Error(kGridShapeMismatch) when the
/// BEV dimensions differ.
VoxelGrid fuse_early(const VoxelGrid& lidar, const VoxelGrid& radar);

/// Text dump: a header line "C H W" followed by one "sensor frame slice"
/// line per channel, then row-major values.
void write_grid(std::ostream& out, const VoxelGrid& grid);
VoxelGrid read_grid(std::istream& in);

}  // namespace lrfusion
