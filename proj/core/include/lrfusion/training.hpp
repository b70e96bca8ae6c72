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
#include <optional>
#include <span>
#include <vector>

#include "lrfusion/detector_stub.hpp"
#include "lrfusion/late_fusion.hpp"
#include "lrfusion/nn/autodiff.hpp"
#include "lrfusion/nn/optim.hpp"
#include "lrfusion/scene_sim.hpp"

namespace lrfusion {

struct TrainConfig {
  int steps = 6000;
  int batch_size = 32;
  nn::AdamConfig adam;
  double tp_threshold = 2.0;  // m, detections matched within this train
  // Loss weights. Only the delta term has trainable parameters here; the
  // beta terms score the detector's own velocity outputs.
  double alpha = 1.0;
  double beta = 0.1;
  double delta = 0.1;
  double holdout_fraction = 0.1;  // trailing share of scenes kept for the held-out AVE
  int log_every = 50;             // held-out AVE cadence in steps
  std::uint64_t seed = 0;

  void validate() const;
};

// One true-positive detection prepared for training.
struct TrainingExample {
  FusionSample sample;
  Vec2 label_velocity;
  bool label_dynamic = false;
  double p_moving = 0.0;
  Vec2 det_velocity;
};

std::vector<TrainingExample> collect_training_examples(std::span<const Scene> scenes,
                                                       const DetectorNoiseConfig& det_cfg,
                                                       const FusionConfig& fusion_cfg,
                                                       double tp_threshold,
                                                       std::uint64_t salt = 0);

/// Fresh matching-network parameters.
nn::ParamStore init_matching_params(std::uint64_t seed);

/// Mean smooth-l1 between refined and label velocities.
double mean_attention_loss(const nn::ParamStore& params, std::span<const TrainingExample> examples);

/// Mean L2 error between refined and label velocities.
double mean_velocity_error(const nn::ParamStore& params, std::span<const TrainingExample> examples);

// Detector velocity terms: mean cross-entropy of p_moving against the
// label's dynamic flag, and mean smooth-l1 of the detector velocity error.
struct DetectorVelocityLoss {
  double cls = 0.0;
  double reg = 0.0;
};

DetectorVelocityLoss detector_velocity_loss(std::span<const TrainingExample> examples);

struct LossRecord {
  int step = 0;
  int epoch = 0;
  double attn = 0.0;      // batch mean attention loss before the update
  double velo_cls = 0.0;
  double velo_reg = 0.0;
  double total = 0.0;     // beta * (velo_cls + velo_reg) + delta * attn
  std::optional<double> holdout_ave;
};

struct TrainResult {
  nn::ParamStore params;
  std::vector<LossRecord> curve;
};

/// Adam on the attention loss over minibatches of examples that have radar
/// candidates. Throws Error(kNoTrainingPairs) when none has.
TrainResult train_late_fusion(std::span<const TrainingExample> train,
                              std::span<const TrainingExample> holdout, const TrainConfig& cfg);

/// Splits off the trailing holdout_fraction of scenes, collects examples and
/// trains.
TrainResult train_late_fusion(std::span<const Scene> scenes, const DetectorNoiseConfig& det_cfg,
                              const FusionConfig& fusion_cfg, const TrainConfig& cfg);

}  // namespace lrfusion
