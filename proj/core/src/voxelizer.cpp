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

#include "lrfusion/voxelizer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "lrfusion/error.hpp"

namespace lrfusion {
namespace {

int cell_count(double lo, double hi, double step) {
  return static_cast<int>(std::lround((hi - lo) / step));
}

void require_whole(double lo, double hi, double step, const char* axis) {
  if (!(step > 0)) {
    throw Error(ErrorCode::kConfigInvalid, std::string("voxel.d") + axis + " must be > 0");
  }
  const double n = (hi - lo) / step;
  if (!(hi > lo) || std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
    throw Error(ErrorCode::kConfigInvalid,
                std::string("voxel ") + axis + " extent is not a whole number of voxels");
  }
}

// Index of the half-open cell containing v, or -1.
int cell_of(double v, double lo, double step, int n) {
  if (!(v >= lo)) return -1;
  const int i = static_cast<int>(std::floor((v - lo) / step));
  return i < n ? i : -1;
}

int frame_of(double t, double t_ref, double interval, int n) {
  const long k = std::lround((t_ref - t) / interval);
  return (k >= 0 && k < n) ? static_cast<int>(k) : -1;
}

}  // namespace

int VoxelConfig::width() const { return cell_count(x_min, x_max, dx); }
int VoxelConfig::height() const { return cell_count(y_min, y_max, dy); }
int VoxelConfig::slices() const { return cell_count(z_min, z_max, dz); }

void VoxelConfig::validate() const {
  require_whole(x_min, x_max, dx, "x");
  require_whole(y_min, y_max, dy, "y");
  require_whole(z_min, z_max, dz, "z");
  if (n_sweeps < 1 || n_radar_cycles < 0) {
    throw Error(ErrorCode::kConfigInvalid, "voxel.n_sweeps must be >= 1 and n_radar_cycles >= 0");
  }
  if (!(sweep_interval > 0)) {
    throw Error(ErrorCode::kConfigInvalid, "voxel.sweep_interval must be > 0");
  }
}

VoxelGrid::VoxelGrid(int height, int width, std::vector<ChannelInfo> layout)
    : height_(height), width_(width), layout_(std::move(layout)),
      values_(layout_.size() * static_cast<std::size_t>(height) * width, 0.0) {}

VoxelGrid VoxelGrid::channel_range(int first, int count) const {
  if (first < 0 || count < 0 || first + count > channels()) {
    throw Error(ErrorCode::kInvalidArgument, "channel range out of bounds");
  }
  VoxelGrid out(height_, width_, {layout_.begin() + first, layout_.begin() + first + count});
  const std::size_t plane = static_cast<std::size_t>(height_) * width_;
  std::copy(values_.begin() + first * plane, values_.begin() + (first + count) * plane,
            out.values_.begin());
  return out;
}

VoxelGrid lidar_occupancy(std::span<const LidarPoint> points, const VoxelConfig& cfg,
                          double t_ref) {
  cfg.validate();
  const int w = cfg.width();
  const int h = cfg.height();
  const int nz = cfg.slices();
  std::vector<ChannelInfo> layout;
  for (int s = 0; s < cfg.n_sweeps; ++s) {
    for (int z = 0; z < nz; ++z) layout.push_back({Sensor::kLidar, s, z});
  }
  VoxelGrid grid(h, w, std::move(layout));

  for (const LidarPoint& p : points) {
    const int sweep = frame_of(p.t, t_ref, cfg.sweep_interval, cfg.n_sweeps);
    const int col = cell_of(p.x, cfg.x_min, cfg.dx, w);
    const int row = cell_of(p.y, cfg.y_min, cfg.dy, h);
    const int slice = cell_of(p.z, cfg.z_min, cfg.dz, nz);
    if (sweep < 0 || col < 0 || row < 0 || slice < 0) continue;
    const double a = cfg.x_min + (col + 0.5) * cfg.dx;
    const double b = cfg.y_min + (row + 0.5) * cfg.dy;
    const double c = cfg.z_min + (slice + 0.5) * cfg.dz;
    const double wx = 1.0 - std::abs(p.x - a) / (cfg.dx / 2);
    const double wy = 1.0 - std::abs(p.y - b) / (cfg.dy / 2);
    const double wz = 1.0 - std::abs(p.z - c) / (cfg.dz / 2);
    grid.at(sweep * nz + slice, row, col) += wx * wy * wz;
  }
  return grid;
}

VoxelGrid radar_occupancy(std::span<const RadarTarget> targets, const VoxelConfig& cfg,
                          double t_ref) {
  cfg.validate();
  const int w = cfg.width();
  const int h = cfg.height();
  std::vector<ChannelInfo> layout;
  for (int k = 0; k < cfg.n_radar_cycles; ++k) layout.push_back({Sensor::kRadar, k, 0});
  VoxelGrid grid(h, w, std::move(layout));

  for (const RadarTarget& q : targets) {
    const int cycle = frame_of(q.t, t_ref, cfg.sweep_interval, cfg.n_radar_cycles);
    const int col = cell_of(q.q.x, cfg.x_min, cfg.dx, w);
    const int row = cell_of(q.q.y, cfg.y_min, cfg.dy, h);
    if (cycle < 0 || col < 0 || row < 0) continue;
    double& cell = grid.at(cycle, row, col);
    if (q.moving) {
      cell = 1.0;
    } else if (cell == 0.0) {
      cell = -1.0;
    }
  }
  return grid;
}

VoxelGrid fuse_early(const VoxelGrid& lidar, const VoxelGrid& radar) {
  if (lidar.height() != radar.height() || lidar.width() != radar.width()) {
    throw Error(ErrorCode::kGridShapeMismatch,
                "LiDAR grid is " + std::to_string(lidar.height()) + "x" +
                    std::to_string(lidar.width()) + ", radar grid is " +
                    std::to_string(radar.height()) + "x" + std::to_string(radar.width()));
  }
  std::vector<ChannelInfo> layout = lidar.layout();
  layout.insert(layout.end(), radar.layout().begin(), radar.layout().end());
  VoxelGrid fused(lidar.height(), lidar.width(), std::move(layout));
  auto out = fused.values();
  std::copy(lidar.values().begin(), lidar.values().end(), out.begin());
  std::copy(radar.values().begin(), radar.values().end(),
            out.begin() + static_cast<std::ptrdiff_t>(lidar.values().size()));
  return fused;
}

void write_grid(std::ostream& out, const VoxelGrid& grid) {
  out << grid.channels() << ' ' << grid.height() << ' ' << grid.width() << '\n';
  for (const ChannelInfo& ch : grid.layout()) {
    out << (ch.sensor == Sensor::kLidar ? "lidar" : "radar") << ' ' << ch.frame << ' '
        << ch.slice << '\n';
  }
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (int c = 0; c < grid.channels(); ++c) {
    for (int r = 0; r < grid.height(); ++r) {
      for (int col = 0; col < grid.width(); ++col) {
        out << grid.at(c, r, col) << (col + 1 == grid.width() ? '\n' : ' ');
      }
    }
  }
  out.precision(precision);
}

VoxelGrid read_grid(std::istream& in) {
  int c = 0, h = 0, w = 0;
  if (!(in >> c >> h >> w) || c < 0 || h < 0 || w < 0) {
    throw Error(ErrorCode::kIoFailure, "malformed grid header");
  }
  std::vector<ChannelInfo> layout;
  for (int i = 0; i < c; ++i) {
    std::string sensor;
    ChannelInfo ch;
    if (!(in >> sensor >> ch.frame >> ch.slice) || (sensor != "lidar" && sensor != "radar")) {
      throw Error(ErrorCode::kIoFailure, "malformed grid channel descriptor");
    }
    ch.sensor = sensor == "lidar" ? Sensor::kLidar : Sensor::kRadar;
    layout.push_back(ch);
  }
  VoxelGrid grid(h, w, std::move(layout));
  for (double& v : grid.values()) {
    if (!(in >> v)) throw Error(ErrorCode::kIoFailure, "grid body truncated");
  }
  return grid;
}

}  // namespace lrfusion
