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

// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit status
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "lrfusion/config.hpp"
#include "lrfusion/eval_metrics.hpp"
#include "lrfusion/heuristic_fusion.hpp"
#include "lrfusion/late_fusion.hpp"
#include "lrfusion/pipeline.hpp"
#include "lrfusion/scene_sim.hpp"
#include "lrfusion/training.hpp"
#include "lrfusion/voxelizer.hpp"
#include "oracles.hpp"

namespace lrfusion {
namespace {

using testing::random_eligible_target;
using testing::random_moving_detection;
using testing::uniform;
using testing::uniform_int;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failure notes; only the first few are kept for the report.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_ << (failures_ > 1 ? "; " : "") << what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    std::ostringstream s;
    s << failures_ << " failure(s): " << notes_.str();
    return {false, s.str()};
  }

 private:
  int failures_ = 0;
  std::ostringstream notes_;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

nn::ParamStore random_params(std::uint64_t seed) { return init_matching_params(seed); }

// 1. Finite-difference check of the full refinement loss.
Outcome gradient_correctness() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  Checker check;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto [sample, target] = testing::random_gradient_instance(rng);
    nn::ParamStore params = random_params(seed);
    {
      // A magnitude floored at zero has no gradient and would pass vacuously.
      nn::Tape tape;
      check.expect(tape.value(refined_velocity(tape, params, sample)).norm() > 0.0,
                   "seed " + std::to_string(seed) + " has a floored magnitude");
    }
    const nn::GradCheckResult r = nn::grad_check(params, [&](nn::Tape& t, nn::ParamStore& ps) {
      return velocity_attention_loss(t, ps, sample, target);
    });
    worst = std::max(worst, r.max_rel_error);
    check.expect(r.max_rel_error < 1e-4,
                 "seed " + std::to_string(seed) + " " + r.worst_param + " rel err " + fmt(r.max_rel_error));
  }
  return check.outcome("max relative error " + fmt(worst, 3) + " over 10 seeds");
}

// 2. Detections without eligible radar targets keep their velocity exactly.
Outcome no_association_identity() {
  std::mt19937_64 rng(202);
  const FusionConfig cfg;
  const nn::ParamStore params = random_params(7);
  Checker check;
  for (int i = 0; i < 1000; ++i) {
    Detection d = random_moving_detection(rng);
    std::vector<RadarTarget> qs;
    // Targets that fail exactly one eligibility condition each.
    const int n = uniform_int(rng, 0, 4);
    for (int k = 0; k < n; ++k) {
      RadarTarget q = random_eligible_target(rng, d);
      switch (uniform_int(rng, 0, 3)) {
        case 0: q.q = d.center() + testing::random_unit(rng) * uniform(rng, 10.01, 30); break;
        case 1: q.t = d.t - uniform(rng, 0.5, 2.0); break;
        case 2: q.t = d.t + uniform(rng, 0.01, 1.0); break;
        default: q.moving = false; break;
      }
      qs.push_back(q);
    }
    if (!eligible_targets(d, qs, cfg).empty()) {
      check.expect(false, "generator produced an eligible target");
      continue;
    }
    const std::vector<Detection> dets = {d};
    const Vec2 v = refine_frame(dets, qs, params, cfg)[0].v;
    check.expect(v.x == d.v.x && v.y == d.v.y, "detection " + std::to_string(i) + " changed");
    const Vec2 tv = refined_velocity(params, make_fusion_sample(d, qs, cfg));
    check.expect(tv == d.v, "sample path changed detection " + std::to_string(i));
  }
  return check.outcome("1000 detections unchanged bit-exactly");
}

// 3. Weights are a distribution and the refined speed a convex combination.
Outcome convexity_bound() {
  std::mt19937_64 rng(303);
  const FusionConfig cfg;
  std::vector<nn::ParamStore> nets;
  for (std::uint64_t s = 0; s < 10; ++s) nets.push_back(random_params(1000 + s));
  Checker check;
  double worst_sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Detection d = random_moving_detection(rng);
    std::vector<RadarTarget> qs;
    const int k = uniform_int(rng, 1, 8);
    for (int j = 0; j < k; ++j) qs.push_back(random_eligible_target(rng, d));
    const std::vector<Detection> dets = {d};
    const auto scores = score_pairs(dets, qs, nets[static_cast<std::size_t>(i % 10)], cfg);
    const DetectionAssociation& a = scores[0];
    double total = 0.0;
    for (double w : a.weights) total += w;
    worst_sum = std::max(worst_sum, std::abs(total - 1.0));
    check.expect(std::abs(total - 1.0) <= 1e-9, "weights sum to " + fmt(total, 17));
    double lo = norm(d.v);
    double hi = lo;
    for (double b : a.v_bp) {
      lo = std::min(lo, b);
      hi = std::max(hi, b);
    }
    const double m = norm(aggregate_velocity(d, a.weights, a.v_bp));
    check.expect(m >= lo - 1e-9 && m <= hi + 1e-9,
                 "magnitude " + fmt(m) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]");
  }
  return check.outcome("10000 instances, max |sum - 1| = " + fmt(worst_sum, 3));
}

// Shared setup of criteria 4 and 5.
struct AblationRun {
  double lidar_only = 0.0;
  double heuristic = 0.0;
  double attention = 0.0;
  double tangential_lidar_only = 0.0;
  double tangential_attention = 0.0;
  std::size_t tangential_count = 0;
  double seconds = 0.0;
};

Config ablation_config() {
  Config cfg;
  cfg.sim.noise.radar_pos_sigma_near = 0.3;
  cfg.sim.noise.radar_pos_sigma_far = 0.3;
  cfg.sim.noise.radar_vel_sigma = 0.3;
  cfg.sim.keep_points = false;
  cfg.detector.vel_mag_sigma = 1.5;
  cfg.eval.slice_edges = {{SliceVariable::kGamma, {80.0, 90.0}}};
  return cfg;
}

const AblationRun& ablation() {
  static const AblationRun run = [] {
    const auto start = std::chrono::steady_clock::now();
    Config cfg = ablation_config();
    cfg.sim.n_scenes = 300;
    const auto train_scenes = generate_dataset(cfg.sim, 1);
    cfg.sim.n_scenes = 500;
    const auto val_scenes = generate_dataset(cfg.sim, 2);
    const TrainResult trained = train_late_fusion(train_scenes, cfg.detector, cfg.fusion, cfg.train);

    AblationRun out;
    auto car_ave = [&](FusionMode mode, const nn::ParamStore* params, double* tangential,
                       std::size_t* count) {
      const auto frames = build_eval_frames(val_scenes, mode, cfg.detector, cfg.fusion, params);
      const EvalReport r = evaluate(frames, cfg.eval);
      const SliceBin& bin = r.slices.at(0).bins.at(0);
      if (tangential) *tangential = bin.ave.value_or(NAN);
      if (count) *count = bin.count;
      return r.classes.at(ObjectClass::kCar).ave.value_or(NAN);
    };
    out.lidar_only = car_ave(FusionMode::kLidarOnly, nullptr, &out.tangential_lidar_only, nullptr);
    out.heuristic = car_ave(FusionMode::kHeuristic, nullptr, nullptr, nullptr);
    out.attention =
        car_ave(FusionMode::kAttention, &trained.params, &out.tangential_attention, &out.tangential_count);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }();
  return run;
}

// 4. Attention beats the heuristic, which beats LiDAR-only, and by >= 10%.
Outcome ablation_direction() {
  const AblationRun& r = ablation();
  const std::string summary = "car AVE lidar_only " + fmt(r.lidar_only) + ", heuristic " +
                              fmt(r.heuristic) + ", attention " + fmt(r.attention) + " (" +
                              fmt(100.0 * (1.0 - r.attention / r.lidar_only), 3) +
                              "% reduction, " + fmt(r.seconds, 3) + " s)";
  const bool ok = r.attention <= 0.9 * r.lidar_only && r.attention <= r.heuristic &&
                  r.heuristic <= r.lidar_only;
  return {ok, summary};
}

// 5. Tangential motion: attention must not be worse than LiDAR-only by > 2%.
Outcome tangential_robustness() {
  const AblationRun& r = ablation();
  const bool ok = r.tangential_attention <= 1.02 * r.tangential_lidar_only;
  return {ok, "gamma in [80, 90] AVE lidar_only " + fmt(r.tangential_lidar_only) + ", attention " +
                  fmt(r.tangential_attention) + " over " + std::to_string(r.tangential_count) +
                  " TPs"};
}

// 6. AP against the exhaustive matcher, IoU against Monte Carlo.
Outcome metric_oracles() {
  std::mt19937_64 rng(606);
  Checker check;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<BoxLabel> labels(static_cast<std::size_t>(uniform_int(rng, 0, 4)));
    std::vector<Detection> dets(static_cast<std::size_t>(uniform_int(rng, 0, 6)));
    for (BoxLabel& l : labels) {
      l.x = uniform(rng, -5, 5);
      l.y = uniform(rng, -5, 5);
    }
    for (Detection& d : dets) {
      d.x = uniform(rng, -5, 5);
      d.y = uniform(rng, -5, 5);
      // Coarse confidences make ties common.
      d.c = uniform_int(rng, 0, 4) / 4.0;
    }
    const double t = std::vector<double>{0.5, 1.0, 2.0, 4.0}[static_cast<std::size_t>(trial % 4)];
    const double got = center_distance_ap(dets, labels, t);
    const double want = testing::brute_force_ap(dets, labels, t);
    check.expect(got == want, "trial " + std::to_string(trial) + ": " + fmt(got, 17) + " vs " + fmt(want, 17));
  }
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const BevBox a = testing::random_box(rng);
    const BevBox b = testing::random_box(rng);
    const double diff = std::abs(bev_iou(a, b) - testing::monte_carlo_iou(a, b, 1000000, 7000 + i));
    worst = std::max(worst, diff);
    check.expect(diff <= 0.01, "IoU pair " + std::to_string(i) + " differs by " + fmt(diff));
  }
  return check.outcome("1000 AP trials exact, 200 IoU pairs within " + fmt(worst, 3));
}

VoxelConfig compact_voxels() {
  VoxelConfig cfg;
  cfg.x_min = -4;
  cfg.x_max = 4;
  cfg.y_min = -4;
  cfg.y_max = 4;
  cfg.z_min = -1;
  cfg.z_max = 2;
  cfg.dx = 0.25;
  cfg.dy = 0.25;
  cfg.dz = 0.5;
  return cfg;
}

// 7. Voxelizer against the brute-force oracle plus the occupancy rules.
Outcome voxelizer_fidelity() {
  const VoxelConfig cfg = compact_voxels();
  std::mt19937_64 rng(707);
  Checker check;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LidarPoint> pts;
    const int n = uniform_int(rng, 0, 400);
    for (int i = 0; i < n; ++i) {
      pts.push_back({uniform(rng, -4.5, 4.5), uniform(rng, -4.5, 4.5), uniform(rng, -1.2, 2.2),
                     1.0 - 0.1 * uniform_int(rng, 0, 6)});
    }
    const VoxelGrid g = lidar_occupancy(pts, cfg, 1.0);
    const auto oracle = testing::brute_force_lidar(pts, cfg, 1.0);
    if (oracle.size() != g.values().size()) {
      check.expect(false, "oracle layout size mismatch");
      continue;
    }
    for (std::size_t i = 0; i < oracle.size(); ++i) worst = std::max(worst, std::abs(g.values()[i] - oracle[i]));

    std::vector<RadarTarget> qs;
    for (int i = 0; i < n / 2; ++i) {
      qs.push_back({{uniform(rng, -4.5, 4.5), uniform(rng, -4.5, 4.5)}, uniform(rng, -10, 10),
                    uniform(rng, 0, 1) < 0.5, 1.0 - 0.1 * uniform_int(rng, 0, 6)});
    }
    const VoxelGrid r = radar_occupancy(qs, cfg, 1.0);
    for (double v : r.values()) {
      check.expect(v == -1.0 || v == 0.0 || v == 1.0, "radar value " + fmt(v));
    }
  }
  check.expect(worst <= 1e-9, "LiDAR oracle deviation " + fmt(worst));

  // Rule: a voxel without points is 0.
  const VoxelGrid empty = lidar_occupancy(std::vector<LidarPoint>{}, cfg);
  for (double v : empty.values()) {
    check.expect(v == 0.0, "empty LiDAR grid has a non-zero voxel");
  }
  // Rule: any moving target makes the voxel 1.
  const RadarTarget moving{{0.1, 0.1}, 4.0, true, 0.0};
  const RadarTarget still{{0.2, 0.2}, 0.0, false, 0.0};
  const int row = static_cast<int>((0.1 - cfg.y_min) / cfg.dy);
  const int col = static_cast<int>((0.1 - cfg.x_min) / cfg.dx);
  check.expect(radar_occupancy(std::vector{moving}, cfg).at(0, row, col) == 1.0, "moving target != 1");
  check.expect(radar_occupancy(std::vector{still, moving}, cfg).at(0, row, col) == 1.0,
               "moving among static != 1");
  // Rule: only static targets make the voxel -1.
  check.expect(radar_occupancy(std::vector{still, still}, cfg).at(0, row, col) == -1.0,
               "two static targets != -1");
  return check.outcome("100 clouds within " + fmt(worst, 3) + ", radar ternary, occupancy rules hold");
}

// 8. Association rules reject their exact thresholds.
Outcome heuristic_rule_fidelity() {
  Checker check;
  const HeuristicRuleInputs ok{1.0, 10.0, 5.0, 5.0};
  check.expect(heuristic_rules_pass(ok), "reference pair rejected");
  auto with = [&](const std::function<void(HeuristicRuleInputs&)>& edit) {
    HeuristicRuleInputs in = ok;
    edit(in);
    return heuristic_rules_pass(in);
  };
  check.expect(!with([](auto& in) { in.distance = 3.0; }), "3 m accepted");
  check.expect(!with([](auto& in) { in.gamma_deg = 40.0; }), "40 deg accepted");
  check.expect(!with([](auto& in) { in.speed = 1.0; }), "1 m/s accepted");
  check.expect(!with([](auto& in) { in.v_bp = 30.0; }), "30 m/s accepted");
  check.expect(with([](auto& in) { in.distance = std::nextafter(3.0, 0.0); }), "just under 3 m rejected");
  check.expect(with([](auto& in) { in.gamma_deg = std::nextafter(40.0, 0.0); }), "just under 40 deg rejected");
  check.expect(with([](auto& in) { in.speed = std::nextafter(1.0, 2.0); }), "just over 1 m/s rejected");
  check.expect(with([](auto& in) { in.v_bp = std::nextafter(30.0, 0.0); }), "just under 30 m/s rejected");

  // The same thresholds through the geometric path.
  Detection d;
  d.x = 10.0;
  d.v = {5.0, 0.0};
  d.p_moving = 0.9;
  check.expect(rule_associate(d, {{12.0, 0.0}, 4.0, true, 0.0}), "radial pair rejected");
  check.expect(!rule_associate(d, {{13.0, 0.0}, 4.0, true, 0.0}), "target at 3 m accepted");
  check.expect(!rule_associate(d, {{12.0, 0.0}, 30.0, true, 0.0}), "v_bp of 30 m/s accepted");
  Detection slow = d;
  slow.v = {1.0, 0.0};
  check.expect(!rule_associate(slow, {{11.0, 0.0}, 1.0, true, 0.0}), "1 m/s detection accepted");
  return check.outcome("strict inequalities at 3 m, 40 deg, 1 m/s and 30 m/s");
}

}  // namespace
}  // namespace lrfusion

int main() {
  using lrfusion::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient correctness", lrfusion::gradient_correctness},
      {"no-association identity", lrfusion::no_association_identity},
      {"convexity bound", lrfusion::convexity_bound},
      {"ablation direction", lrfusion::ablation_direction},
      {"tangential robustness", lrfusion::tangential_robustness},
      {"metric oracles", lrfusion::metric_oracles},
      {"voxelizer fidelity", lrfusion::voxelizer_fidelity},
      {"heuristic rule fidelity", lrfusion::heuristic_rule_fidelity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::cout << "[" << (o.pass ? "PASS" : "FAIL") << "] " << (i + 1) << ". " << criteria[i].first
              << ": " << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
