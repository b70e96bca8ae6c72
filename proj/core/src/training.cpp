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

#include "lrfusion/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrfusion/error.hpp"
#include "lrfusion/nn/mlp.hpp"
#include "lrfusion/pipeline.hpp"
#include "lrfusion/rng.hpp"

namespace lrfusion {
namespace {

constexpr std::uint64_t kShuffleStream = 11;

}  // namespace

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kConfigInvalid, what);
  };
  require(steps >= 0, "train.steps must be >= 0");
  require(batch_size > 0, "train.batch_size must be > 0");
  require(adam.lr > 0, "train.lr must be > 0");
  require(adam.beta1 >= 0 && adam.beta1 < 1, "train.beta1 must be in [0, 1)");
  require(adam.beta2 >= 0 && adam.beta2 < 1, "train.beta2 must be in [0, 1)");
  require(adam.eps > 0, "train.eps must be > 0");
  require(tp_threshold > 0, "train.tp_threshold must be > 0");
  require(alpha >= 0 && beta >= 0 && delta > 0, "train loss weights must be >= 0 (delta > 0)");
  require(holdout_fraction >= 0 && holdout_fraction < 1, "train.holdout_fraction must be in [0, 1)");
  require(log_every > 0, "train.log_every must be > 0");
}

std::vector<TrainingExample> collect_training_examples(std::span<const Scene> scenes,
                                                       const DetectorNoiseConfig& det_cfg,
                                                       const FusionConfig& fusion_cfg,
                                                       double tp_threshold, std::uint64_t salt) {
  fusion_cfg.validate();
  std::vector<TrainingExample> out;
  for (const Scene& scene : scenes) {
    for (std::size_t f = 0; f < scene.frames.size(); ++f) {
      const Frame& frame = scene.frames[f];
      const auto dets = frame_detections(scene, f, det_cfg, salt);
      for (const LabelMatch& m : match_to_labels(dets, frame.labels, tp_threshold)) {
        if (!m.label) continue;
        const Detection& d = dets[m.det];
        const BoxLabel& label = frame.labels[*m.label];
        TrainingExample ex;
        ex.sample = make_fusion_sample(d, frame.radar, fusion_cfg);
        ex.label_velocity = label.v;
        ex.label_dynamic = label.is_dynamic;
        ex.p_moving = d.p_moving;
        ex.det_velocity = d.v;
        out.push_back(std::move(ex));
      }
    }
  }
  return out;
}

nn::ParamStore init_matching_params(std::uint64_t seed) {
  nn::ParamStore params;
  nn::init_mlp(matching_mlp_spec(), params, seed);
  return params;
}

double mean_attention_loss(const nn::ParamStore& params,
                           std::span<const TrainingExample> examples) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const TrainingExample& ex : examples) {
    const Vec2 e = refined_velocity(params, ex.sample) - ex.label_velocity;
    total += nn::smooth_l1(e.x) + nn::smooth_l1(e.y);
  }
  return total / static_cast<double>(examples.size());
}

double mean_velocity_error(const nn::ParamStore& params,
                           std::span<const TrainingExample> examples) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const TrainingExample& ex : examples) {
    total += norm(refined_velocity(params, ex.sample) - ex.label_velocity);
  }
  return total / static_cast<double>(examples.size());
}

DetectorVelocityLoss detector_velocity_loss(std::span<const TrainingExample> examples) {
  DetectorVelocityLoss out;
  if (examples.empty()) return out;
  for (const TrainingExample& ex : examples) {
    out.cls += nn::binary_cross_entropy(ex.p_moving, ex.label_dynamic ? 1 : 0);
    const Vec2 e = ex.det_velocity - ex.label_velocity;
    out.reg += nn::smooth_l1(e.x) + nn::smooth_l1(e.y);
  }
  out.cls /= static_cast<double>(examples.size());
  out.reg /= static_cast<double>(examples.size());
  return out;
}

TrainResult train_late_fusion(std::span<const TrainingExample> train,
                              std::span<const TrainingExample> holdout, const TrainConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].sample.features.cols() > 0) pool.push_back(i);
  }
  if (pool.empty()) {
    throw Error(ErrorCode::kNoTrainingPairs,
                "no true-positive detection has an eligible radar target");
  }

  TrainResult result;
  result.params = init_matching_params(derive_seed(cfg.seed, {0}));
  Rng rng = make_rng(derive_seed(cfg.seed, {kShuffleStream}));
  std::shuffle(pool.begin(), pool.end(), rng);

  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size),
                                                   pool.size());
  std::size_t cursor = 0;
  int epoch = 0;
  nn::Tape tape;
  nn::Matrix upstream(1, 1);
  upstream(0, 0) = cfg.delta / static_cast<double>(batch);
  for (int step = 0; step < cfg.steps; ++step) {
    if (cursor + batch > pool.size()) {
      std::shuffle(pool.begin(), pool.end(), rng);
      cursor = 0;
      ++epoch;
    }
    LossRecord rec;
    rec.step = step;
    rec.epoch = epoch;
    for (std::size_t b = 0; b < batch; ++b) {
      const TrainingExample& ex = train[pool[cursor + b]];
      rec.velo_cls += nn::binary_cross_entropy(ex.p_moving, ex.label_dynamic ? 1 : 0);
      const Vec2 e = ex.det_velocity - ex.label_velocity;
      rec.velo_reg += nn::smooth_l1(e.x) + nn::smooth_l1(e.y);
      tape.clear();
      const nn::Var loss =
          velocity_attention_loss(tape, result.params, ex.sample, ex.label_velocity);
      rec.attn += tape.scalar(loss);
      tape.backward(loss, upstream);
    }
    cursor += batch;
    rec.attn /= static_cast<double>(batch);
    rec.velo_cls /= static_cast<double>(batch);
    rec.velo_reg /= static_cast<double>(batch);
    rec.total = cfg.beta * (rec.velo_cls + rec.velo_reg) + cfg.delta * rec.attn;
    if (!holdout.empty() && (step % cfg.log_every == 0 || step + 1 == cfg.steps)) {
      rec.holdout_ave = mean_velocity_error(result.params, holdout);
    }
    nn::adam_step(result.params, cfg.adam);
    result.curve.push_back(rec);
  }
  return result;
}

TrainResult train_late_fusion(std::span<const Scene> scenes, const DetectorNoiseConfig& det_cfg,
                              const FusionConfig& fusion_cfg, const TrainConfig& cfg) {
  cfg.validate();
  const auto n_holdout = static_cast<std::size_t>(
      std::floor(cfg.holdout_fraction * static_cast<double>(scenes.size())));
  const auto fit = scenes.first(scenes.size() - n_holdout);
  const auto held = scenes.last(n_holdout);
  const auto train = collect_training_examples(fit, det_cfg, fusion_cfg, cfg.tp_threshold);
  const auto holdout = collect_training_examples(held, det_cfg, fusion_cfg, cfg.tp_threshold);
  return train_late_fusion(train, holdout, cfg);
}

}  // namespace lrfusion
