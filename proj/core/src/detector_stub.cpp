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

#include "lrfusion/detector_stub.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "lrfusion/error.hpp"
#include "lrfusion/rng.hpp"

namespace lrfusion {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kConfigInvalid, what);
}

}  // namespace

void DetectorNoiseConfig::validate() const {
  require(pos_sigma >= 0, "detector.pos_sigma must be >= 0");
  require(size_sigma >= 0, "detector.size_sigma must be >= 0");
  require(heading_sigma >= 0, "detector.heading_sigma must be >= 0");
  require(vel_mag_sigma >= 0, "detector.vel_mag_sigma must be >= 0");
  require(vel_dir_sigma >= 0, "detector.vel_dir_sigma must be >= 0");
  require(drop_prob >= 0 && drop_prob <= 1, "detector.drop_prob must be in [0, 1]");
  require(fp_rate >= 0, "detector.fp_rate must be >= 0");
  require(moving_prob_noise >= 0 && moving_prob_noise <= 1,
          "detector.moving_prob_noise must be in [0, 1]");
  require(confidence_spread >= 0 && confidence_spread <= 1,
          "detector.confidence_spread must be in [0, 1]");
  require(fp_max_confidence >= 0 && fp_max_confidence <= 1,
          "detector.fp_max_confidence must be in [0, 1]");
  require(fp_range > 0, "detector.fp_range must be > 0");
}

std::vector<Detection> detect(std::span<const BoxLabel> labels, const DetectorNoiseConfig& cfg,
                              std::uint64_t seed, double t) {
  cfg.validate();
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Detection> dets;
  for (const BoxLabel& label : labels) {
    const bool dropped = unit(rng) < cfg.drop_prob;
    Detection d;
    d.x = label.x + cfg.pos_sigma * normal(rng);
    d.y = label.y + cfg.pos_sigma * normal(rng);
    d.w = std::max(0.1, label.w + cfg.size_sigma * normal(rng));
    d.l = std::max(0.1, label.l + cfg.size_sigma * normal(rng));
    d.theta = wrap_angle(label.theta + cfg.heading_sigma * normal(rng));
    d.c = 1.0 - cfg.confidence_spread * unit(rng);
    d.cls = label.cls;
    d.t = t;

    const double dir_noise = cfg.vel_dir_sigma * normal(rng);
    const double mag_noise = cfg.vel_mag_sigma * normal(rng);
    const double speed = norm(label.v);
    if (speed > 0.0) {
      const double noisy_speed = std::max(0.0, speed + mag_noise);
      d.v = rotate(label.v, dir_noise) * (noisy_speed / speed);
    }
    const double pull = cfg.moving_prob_noise * unit(rng);
    d.p_moving = label.is_dynamic ? 1.0 - pull : pull;
    if (d.p_moving < 0.5) d.v = {};

    if (!dropped) dets.push_back(d);
  }

  if (cfg.fp_rate > 0.0) {
    const int n_fp = std::poisson_distribution<int>(cfg.fp_rate)(rng);
    for (int k = 0; k < n_fp; ++k) {
      Detection d;
      const bool moto = unit(rng) < 0.2;
      d.cls = moto ? ObjectClass::kMotorcycle : ObjectClass::kCar;
      const double r = cfg.fp_range * std::sqrt(unit(rng));
      const double a = 2.0 * std::numbers::pi * unit(rng);
      d.x = r * std::cos(a);
      d.y = r * std::sin(a);
      d.w = moto ? 0.8 : 1.9;
      d.l = moto ? 2.1 : 4.5;
      d.theta = wrap_angle(2.0 * std::numbers::pi * unit(rng));
      const double fp_speed = 15.0 * unit(rng);
      d.v = rotate({fp_speed, 0.0}, d.theta);
      d.p_moving = unit(rng);
      if (d.p_moving < 0.5) d.v = {};
      d.c = cfg.fp_max_confidence * unit(rng);
      d.t = t;
      dets.push_back(d);
    }
  }
  return dets;
}

std::vector<LabelMatch> match_to_labels(std::span<const Detection> dets,
                                        std::span<const BoxLabel> labels,
                                        double dist_threshold) {
  if (!(dist_threshold > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "match distance threshold must be > 0");
  }
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].c > dets[b].c; });

  std::vector<LabelMatch> matches(dets.size());
  std::vector<bool> taken(labels.size(), false);
  for (std::size_t i : order) {
    matches[i].det = i;
    std::optional<std::size_t> best;
    double best_dist = dist_threshold;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (taken[j]) continue;
      const double dist = norm(dets[i].center() - labels[j].center());
      if (dist < best_dist || (!best && dist == best_dist)) {
        best = j;
        best_dist = dist;
      }
    }
    if (best) {
      taken[*best] = true;
      matches[i].label = best;
      matches[i].distance = best_dist;
    }
  }
  return matches;
}

}  // namespace lrfusion
