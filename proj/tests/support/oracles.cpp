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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace lrfusion::testing {
namespace {

// Greedy matching of the detections listed in `order`; returns how many
// found a label.
std::size_t count_matches(std::span<const Detection> dets, std::span<const BoxLabel> labels,
                          const std::vector<std::size_t>& order, std::size_t prefix,
                          double threshold) {
  std::vector<char> used(labels.size(), 0);
  std::size_t matched = 0;
  for (std::size_t r = 0; r < prefix; ++r) {
    const Detection& d = dets[order[r]];
    long best = -1;
    double best_dist = 0.0;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::hypot(d.x - labels[j].x, d.y - labels[j].y);
      if (dist > threshold) continue;
      if (best < 0 || dist < best_dist) {
        best = static_cast<long>(j);
        best_dist = dist;
      }
    }
    if (best >= 0) {
      used[static_cast<std::size_t>(best)] = 1;
      ++matched;
    }
  }
  return matched;
}

bool inside(const BevBox& b, double px, double py) {
  const double c = std::cos(b.theta);
  const double s = std::sin(b.theta);
  const double dx = px - b.x;
  const double dy = py - b.y;
  const double along = c * dx + s * dy;
  const double across = -s * dx + c * dy;
  return std::abs(along) <= b.l / 2 && std::abs(across) <= b.w / 2;
}

}  // namespace

double brute_force_ap(std::span<const Detection> dets, std::span<const BoxLabel> labels,
                      double threshold) {
  if (labels.empty() || dets.empty()) return 0.0;
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].c > dets[b].c; });
  const double n = static_cast<double>(labels.size());
  std::vector<double> precision;
  std::vector<double> recall;
  for (std::size_t k = 1; k <= dets.size(); ++k) {
    const auto tp = static_cast<double>(count_matches(dets, labels, order, k, threshold));
    precision.push_back(tp / static_cast<double>(k));
    recall.push_back(tp / n);
  }
  double ap = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < precision.size(); ++k) {
    const double best = *std::max_element(precision.begin() + static_cast<long>(k), precision.end());
    ap += (recall[k] - prev) * best;
    prev = recall[k];
  }
  return ap;
}

double monte_carlo_iou(const BevBox& a, const BevBox& b, int samples, std::uint64_t seed) {
  double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
  for (const BevBox& box : {a, b}) {
    const double r = std::hypot(box.w, box.l) / 2;
    lo_x = std::min(lo_x, box.x - r);
    hi_x = std::max(hi_x, box.x + r);
    lo_y = std::min(lo_y, box.y - r);
    hi_y = std::max(hi_y, box.y + r);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo_x, hi_x);
  std::uniform_real_distribution<double> uy(lo_y, hi_y);
  long in_a = 0, in_b = 0, both = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    const bool ia = inside(a, x, y);
    const bool ib = inside(b, x, y);
    in_a += ia;
    in_b += ib;
    both += ia && ib;
  }
  const long uni = in_a + in_b - both;
  return uni == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(uni);
}

std::vector<double> brute_force_lidar(std::span<const LidarPoint> points, const VoxelConfig& cfg,
                                      double t_ref) {
  const int w = cfg.width();
  const int h = cfg.height();
  const int nz = cfg.slices();
  std::vector<double> out(static_cast<std::size_t>(cfg.n_sweeps) * nz * h * w, 0.0);
  for (const LidarPoint& p : points) {
    const double age = (t_ref - p.t) / cfg.sweep_interval;
    for (int s = 0; s < cfg.n_sweeps; ++s) {
      if (std::abs(age - s) >= 0.5) continue;
      for (int z = 0; z < nz; ++z) {
        const double z0 = cfg.z_min + z * cfg.dz;
        if (!(p.z >= z0 && p.z < z0 + cfg.dz)) continue;
        for (int row = 0; row < h; ++row) {
          const double y0 = cfg.y_min + row * cfg.dy;
          if (!(p.y >= y0 && p.y < y0 + cfg.dy)) continue;
          for (int col = 0; col < w; ++col) {
            const double x0 = cfg.x_min + col * cfg.dx;
            if (!(p.x >= x0 && p.x < x0 + cfg.dx)) continue;
            const double fx = 1.0 - std::abs(p.x - (x0 + cfg.dx / 2)) / (cfg.dx / 2);
            const double fy = 1.0 - std::abs(p.y - (y0 + cfg.dy / 2)) / (cfg.dy / 2);
            const double fz = 1.0 - std::abs(p.z - (z0 + cfg.dz / 2)) / (cfg.dz / 2);
            const std::size_t channel = static_cast<std::size_t>(s) * nz + z;
            out[(channel * h + row) * w + col] += fx * fy * fz;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace lrfusion::testing
