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

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "lrfusion/nn/autodiff.hpp"
#include "lrfusion/nn/mlp.hpp"
#include "lrfusion/types.hpp"

namespace lrfusion {

// Magnitude cap on back-projected radial velocities, m/s.
inline constexpr double kBackProjectCap = 50.0;

struct FusionConfig {
  double eligibility_radius = 10.0;  // m, detection center to radar target
  double window = 0.5;               // s, radar accumulation window
  double min_speed = 0.1;            // m/s, below this the motion direction is undefined
  double moving_prob_gate = 0.5;     // detections below this are static
  // Fixed feature standardization.
  double length_scale = 10.0;
  double time_scale = 0.25;
  double speed_scale = 20.0;

  void validate() const;
};

// f(D, Q) = (f_det(D), f_det_radar(D, Q)).
struct PairFeature {
  // w, l, |v|, v_x/|v|, v_y/|v|, cos(gamma)
  std::array<double, 6> det{};
  // dx, dy, dt, v_bp
  std::array<double, 4> det_radar{};

  std::array<double, 10> values() const;
};

inline constexpr int kPairFeatureDim = 10;

/// Aligns a radial velocity with the detection's motion direction:
/// v_par / cos(phi), magnitude capped at 50 m/s with the sign kept. When
/// |cos(phi)| < 1e-3 the result saturates to sign(v_par) * 50, with
/// sign(0) = 0.
double back_project(double v_par, double phi_cos);

/// Pairwise feature between a moving detection and a moving radar target.
/// gamma is the angle between the detection's velocity and its own radial
/// direction; phi uses the target's radial direction instead.
/// Throws Error(kStaticDetection) if |d.v| <= 0.1 and Error(kStaticTarget)
/// if the target is not flagged as moving.
PairFeature pair_feature(const Detection& d, const RadarTarget& q);

/// Standardized network input for one pair.
std::array<double, 10> standardize(const PairFeature& f, const FusionConfig& cfg);

/// 10 -> 32 -> 64 -> 64 -> 64 -> 1, layer-normalized ReLU hidden layers.
nn::MlpSpec matching_mlp_spec();

/// Detections the attention step may change: p_moving >= gate and a defined
/// motion direction.
bool is_refinable(const Detection& d, const FusionConfig& cfg);

/// Indices of moving targets inside the window and radius of `d`.
std::vector<std::size_t> eligible_targets(const Detection& d, std::span<const RadarTarget> targets,
                                          const FusionConfig& cfg);

struct DetectionAssociation {
  std::vector<std::size_t> targets;  // eligible radar target indices
  std::vector<double> raw;           // matching scores, one per target
  std::vector<double> v_bp;          // aligned velocities, one per target
  std::vector<double> weights;       // softmax over (1, raw...); [0] is no-association
};

using AssociationScores = std::vector<DetectionAssociation>;

/// Scores every detection against its eligible targets and normalizes with
/// a fixed unit logit prepended. Non-refinable detections and detections
/// without candidates get weights = {1}.
AssociationScores score_pairs(std::span<const Detection> dets, std::span<const RadarTarget> targets,
                              const nn::ParamStore& params, const FusionConfig& cfg);

/// Refined velocity: the weighted sum of (|v|, v_bp...) applied along the
/// original motion direction, floored at zero magnitude. weights.size() must
/// equal v_bp.size() + 1. A single weight returns d.v unchanged.
Vec2 aggregate_velocity(const Detection& d, std::span<const double> weights,
                        std::span<const double> v_bp);

/// Attention-based velocity refinement of one frame.
std::vector<Detection> refine_frame(std::span<const Detection> dets,
                                    std::span<const RadarTarget> targets,
                                    const nn::ParamStore& params, const FusionConfig& cfg);

// One detection prepared for the differentiable refinement path.
struct FusionSample {
  Vec2 velocity;            // detector velocity
  nn::Matrix features;      // 10 x K standardized pair features
  std::vector<double> v_bp;  // K aligned velocities
};

FusionSample make_fusion_sample(const Detection& d, std::span<const RadarTarget> targets,
                                const FusionConfig& cfg);

/// Records the refined 2D velocity (2 x 1) of `sample` on `tape`. With no
/// candidates this is a constant equal to the input velocity.
nn::Var refined_velocity(nn::Tape& tape, nn::ParamStore& params, const FusionSample& sample);

/// Inference counterpart of refined_velocity over frozen parameters.
Vec2 refined_velocity(const nn::ParamStore& params, const FusionSample& sample);

/// smooth-l1 between the refined velocity and `target_velocity`, summed over
/// both components.
nn::Var velocity_attention_loss(nn::Tape& tape, nn::ParamStore& params,
                                const FusionSample& sample, const Vec2& target_velocity);

}  // namespace lrfusion
