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

#include "lrfusion/late_fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrfusion/error.hpp"

namespace lrfusion {
namespace {

// Radar targets whose timestamp is this far past the detection still count
// as inside the window.
constexpr double kTimeSlack = 1e-9;

double sign(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

}  // namespace

void FusionConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kConfigInvalid, what);
  };
  require(eligibility_radius > 0, "fusion.eligibility_radius must be > 0");
  require(window > 0, "fusion.window must be > 0");
  require(min_speed >= 0, "fusion.min_speed must be >= 0");
  require(moving_prob_gate >= 0 && moving_prob_gate <= 1,
          "fusion.moving_prob_gate must be in [0, 1]");
  require(length_scale > 0 && time_scale > 0 && speed_scale > 0,
          "fusion feature scales must be > 0");
}

std::array<double, 10> PairFeature::values() const {
  std::array<double, 10> out{};
  std::copy(det.begin(), det.end(), out.begin());
  std::copy(det_radar.begin(), det_radar.end(), out.begin() + det.size());
  return out;
}

double back_project(double v_par, double phi_cos) {
  if (std::abs(phi_cos) < 1e-3) return sign(v_par) * kBackProjectCap;
  return std::clamp(v_par / phi_cos, -kBackProjectCap, kBackProjectCap);
}

PairFeature pair_feature(const Detection& d, const RadarTarget& q) {
  const double speed = norm(d.v);
  if (!(speed > 0.1)) {
    throw Error(ErrorCode::kStaticDetection, "detection speed " + std::to_string(speed) +
                                                 " m/s leaves the motion direction undefined");
  }
  if (!q.moving) throw Error(ErrorCode::kStaticTarget, "radar target is not moving");
  const Vec2 dir = d.v / speed;
  PairFeature f;
  f.det = {d.w, d.l, speed, dir.x, dir.y, cos_angle(d.v, radial_unit(d.center()))};
  const double phi_cos = cos_angle(d.v, radial_unit(q.q));
  f.det_radar = {q.q.x - d.x, q.q.y - d.y, q.t - d.t, back_project(q.v_par, phi_cos)};
  return f;
}

std::array<double, 10> standardize(const PairFeature& f, const FusionConfig& cfg) {
  const double L = cfg.length_scale;
  const double S = cfg.speed_scale;
  return {f.det[0] / L,          f.det[1] / L,          f.det[2] / S, f.det[3],
          f.det[4],              f.det[5],              f.det_radar[0] / L,
          f.det_radar[1] / L,    f.det_radar[2] / cfg.time_scale, f.det_radar[3] / S};
}

nn::MlpSpec matching_mlp_spec() {
  nn::MlpSpec spec;
  spec.widths = {kPairFeatureDim, 32, 64, 64, 64, 1};
  spec.activation = nn::Activation::kRelu;
  spec.layer_norm = {true, true, true, true, false};
  return spec;
}

bool is_refinable(const Detection& d, const FusionConfig& cfg) {
  return d.p_moving >= cfg.moving_prob_gate && norm(d.v) > cfg.min_speed &&
         norm(d.center()) > kGeomEps;
}

std::vector<std::size_t> eligible_targets(const Detection& d, std::span<const RadarTarget> targets,
                                          const FusionConfig& cfg) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const RadarTarget& q = targets[j];
    const double age = d.t - q.t;
    if (!q.moving || age < -kTimeSlack || age >= cfg.window) continue;
    if (norm(q.q) <= kGeomEps) continue;
    if (norm(q.q - d.center()) > cfg.eligibility_radius) continue;
    out.push_back(j);
  }
  return out;
}

FusionSample make_fusion_sample(const Detection& d, std::span<const RadarTarget> targets,
                                const FusionConfig& cfg) {
  FusionSample s;
  s.velocity = d.v;
  std::vector<std::size_t> idx;
  if (is_refinable(d, cfg)) idx = eligible_targets(d, targets, cfg);
  s.features.resize(kPairFeatureDim, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const PairFeature f = pair_feature(d, targets[idx[k]]);
    const auto x = standardize(f, cfg);
    for (int r = 0; r < kPairFeatureDim; ++r) s.features(r, static_cast<Eigen::Index>(k)) = x[r];
    s.v_bp.push_back(f.det_radar[3]);
  }
  return s;
}

AssociationScores score_pairs(std::span<const Detection> dets, std::span<const RadarTarget> targets,
                              const nn::ParamStore& params, const FusionConfig& cfg) {
  cfg.validate();
  const nn::MlpSpec spec = matching_mlp_spec();
  AssociationScores scores(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    DetectionAssociation& a = scores[i];
    if (is_refinable(dets[i], cfg)) a.targets = eligible_targets(dets[i], targets, cfg);
    if (a.targets.empty()) {
      a.weights = {1.0};
      continue;
    }
    nn::Matrix x(kPairFeatureDim, static_cast<Eigen::Index>(a.targets.size()));
    for (std::size_t k = 0; k < a.targets.size(); ++k) {
      const PairFeature f = pair_feature(dets[i], targets[a.targets[k]]);
      const auto z = standardize(f, cfg);
      for (int r = 0; r < kPairFeatureDim; ++r) x(r, static_cast<Eigen::Index>(k)) = z[r];
      a.v_bp.push_back(f.det_radar[3]);
    }
    const nn::Matrix s = nn::mlp_eval(spec, params, x);
    a.raw.assign(s.data(), s.data() + s.size());

    double peak = 1.0;
    for (double r : a.raw) peak = std::max(peak, r);
    a.weights.resize(a.raw.size() + 1);
    a.weights[0] = std::exp(1.0 - peak);
    double total = a.weights[0];
    for (std::size_t k = 0; k < a.raw.size(); ++k) {
      a.weights[k + 1] = std::exp(a.raw[k] - peak);
      total += a.weights[k + 1];
    }
    for (double& w : a.weights) w /= total;
  }
  return scores;
}

Vec2 aggregate_velocity(const Detection& d, std::span<const double> weights,
                        std::span<const double> v_bp) {
  if (weights.size() != v_bp.size() + 1) {
    throw Error(ErrorCode::kDimensionMismatch, "need one weight per candidate plus the detection");
  }
  if (weights.size() == 1) return d.v;
  const double speed = norm(d.v);
  if (!(speed > 0.1)) {
    throw Error(ErrorCode::kStaticDetection, "cannot aggregate along an undefined direction");
  }
  double magnitude = weights[0] * speed;
  for (std::size_t k = 0; k < v_bp.size(); ++k) magnitude += weights[k + 1] * v_bp[k];
  magnitude = std::max(0.0, magnitude);
  return (d.v / speed) * magnitude;
}

std::vector<Detection> refine_frame(std::span<const Detection> dets,
                                    std::span<const RadarTarget> targets,
                                    const nn::ParamStore& params, const FusionConfig& cfg) {
  const AssociationScores scores = score_pairs(dets, targets, params, cfg);
  std::vector<Detection> out(dets.begin(), dets.end());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    out[i].v = aggregate_velocity(dets[i], scores[i].weights, scores[i].v_bp);
  }
  return out;
}

nn::Var refined_velocity(nn::Tape& tape, nn::ParamStore& params, const FusionSample& sample) {
  const Eigen::Index k = sample.features.cols();
  if (k == 0) {
    nn::Matrix v(2, 1);
    v << sample.velocity.x, sample.velocity.y;
    return tape.constant(std::move(v));
  }
  const double speed = norm(sample.velocity);
  const nn::Var scores = nn::mlp_apply(tape, matching_mlp_spec(), params,
                                       tape.constant(sample.features));
  const nn::Var logits = tape.concat_cols(tape.constant(nn::Matrix::Ones(1, 1)), scores);
  const nn::Var weights = tape.softmax_rows(logits);
  nn::Matrix candidates(k + 1, 1);
  candidates(0, 0) = speed;
  for (Eigen::Index j = 0; j < k; ++j) candidates(j + 1, 0) = sample.v_bp[j];
  const nn::Var magnitude = tape.relu(tape.matmul(weights, tape.constant(std::move(candidates))));
  nn::Matrix dir(2, 1);
  dir << sample.velocity.x / speed, sample.velocity.y / speed;
  return tape.matmul(tape.constant(std::move(dir)), magnitude);
}

Vec2 refined_velocity(const nn::ParamStore& params, const FusionSample& sample) {
  const Eigen::Index k = sample.features.cols();
  if (k == 0) return sample.velocity;
  const nn::Matrix s = nn::mlp_eval(matching_mlp_spec(), params, sample.features);
  double peak = 1.0;
  for (Eigen::Index j = 0; j < k; ++j) peak = std::max(peak, s(0, j));
  double total = std::exp(1.0 - peak);
  const double speed = norm(sample.velocity);
  double magnitude = total * speed;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double e = std::exp(s(0, j) - peak);
    total += e;
    magnitude += e * sample.v_bp[j];
  }
  magnitude = std::max(0.0, magnitude / total);
  return (sample.velocity / speed) * magnitude;
}

nn::Var velocity_attention_loss(nn::Tape& tape, nn::ParamStore& params,
                                const FusionSample& sample, const Vec2& target_velocity) {
  nn::Matrix target(2, 1);
  target << target_velocity.x, target_velocity.y;
  const nn::Var v = refined_velocity(tape, params, sample);
  return tape.smooth_l1(tape.sub(v, tape.constant(std::move(target))));
}

}  // namespace lrfusion
