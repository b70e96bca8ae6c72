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

#include "lrfusion/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json_convert.hpp"

namespace lrfusion {
namespace detail {
namespace {

Json noise_to_json(const SensorNoiseConfig& n) {
  return {{"lidar_range_sigma", n.lidar_range_sigma},
          {"radar_pos_sigma_near", n.radar_pos_sigma_near},
          {"radar_pos_sigma_far", n.radar_pos_sigma_far},
          {"radar_vel_sigma", n.radar_vel_sigma},
          {"radar_detection_prob", n.radar_detection_prob},
          {"radar_false_positive_rate", n.radar_false_positive_rate},
          {"lidar_density_at_10m", n.lidar_density_at_10m},
          {"max_range_lidar", n.max_range_lidar},
          {"max_range_radar", n.max_range_radar},
          {"clutter_range", n.clutter_range}};
}

SensorNoiseConfig noise_from_json(const Json& j, const std::string& section) {
  SensorNoiseConfig n;
  FieldReader r(j, section);
  r.read("lidar_range_sigma", n.lidar_range_sigma);
  r.read("radar_pos_sigma_near", n.radar_pos_sigma_near);
  r.read("radar_pos_sigma_far", n.radar_pos_sigma_far);
  r.read("radar_vel_sigma", n.radar_vel_sigma);
  r.read("radar_detection_prob", n.radar_detection_prob);
  r.read("radar_false_positive_rate", n.radar_false_positive_rate);
  r.read("lidar_density_at_10m", n.lidar_density_at_10m);
  r.read("max_range_lidar", n.max_range_lidar);
  r.read("max_range_radar", n.max_range_radar);
  r.read("clutter_range", n.clutter_range);
  r.finish();
  return n;
}

Json detector_to_json(const DetectorNoiseConfig& d) {
  return {{"pos_sigma", d.pos_sigma},
          {"size_sigma", d.size_sigma},
          {"heading_sigma", d.heading_sigma},
          {"vel_mag_sigma", d.vel_mag_sigma},
          {"vel_dir_sigma", d.vel_dir_sigma},
          {"drop_prob", d.drop_prob},
          {"fp_rate", d.fp_rate},
          {"moving_prob_noise", d.moving_prob_noise},
          {"confidence_spread", d.confidence_spread},
          {"fp_max_confidence", d.fp_max_confidence},
          {"fp_range", d.fp_range}};
}

DetectorNoiseConfig detector_from_json(const Json& j) {
  DetectorNoiseConfig d;
  FieldReader r(j, "detector");
  r.read("pos_sigma", d.pos_sigma);
  r.read("size_sigma", d.size_sigma);
  r.read("heading_sigma", d.heading_sigma);
  r.read("vel_mag_sigma", d.vel_mag_sigma);
  r.read("vel_dir_sigma", d.vel_dir_sigma);
  r.read("drop_prob", d.drop_prob);
  r.read("fp_rate", d.fp_rate);
  r.read("moving_prob_noise", d.moving_prob_noise);
  r.read("confidence_spread", d.confidence_spread);
  r.read("fp_max_confidence", d.fp_max_confidence);
  r.read("fp_range", d.fp_range);
  r.finish();
  return d;
}

Json voxel_to_json(const VoxelConfig& v) {
  return {{"dx", v.dx},       {"dy", v.dy},       {"dz", v.dz},
          {"x_min", v.x_min}, {"x_max", v.x_max}, {"y_min", v.y_min},
          {"y_max", v.y_max}, {"z_min", v.z_min}, {"z_max", v.z_max},
          {"n_sweeps", v.n_sweeps}, {"n_radar_cycles", v.n_radar_cycles},
          {"sweep_interval", v.sweep_interval}};
}

VoxelConfig voxel_from_json(const Json& j) {
  VoxelConfig v;
  FieldReader r(j, "voxel");
  r.read("dx", v.dx);
  r.read("dy", v.dy);
  r.read("dz", v.dz);
  r.read("x_min", v.x_min);
  r.read("x_max", v.x_max);
  r.read("y_min", v.y_min);
  r.read("y_max", v.y_max);
  r.read("z_min", v.z_min);
  r.read("z_max", v.z_max);
  r.read("n_sweeps", v.n_sweeps);
  r.read("n_radar_cycles", v.n_radar_cycles);
  r.read("sweep_interval", v.sweep_interval);
  r.finish();
  return v;
}

Json fusion_to_json(const FusionConfig& f) {
  return {{"eligibility_radius", f.eligibility_radius},
          {"window", f.window},
          {"min_speed", f.min_speed},
          {"moving_prob_gate", f.moving_prob_gate},
          {"length_scale", f.length_scale},
          {"time_scale", f.time_scale},
          {"speed_scale", f.speed_scale}};
}

FusionConfig fusion_from_json(const Json& j) {
  FusionConfig f;
  FieldReader r(j, "fusion");
  r.read("eligibility_radius", f.eligibility_radius);
  r.read("window", f.window);
  r.read("min_speed", f.min_speed);
  r.read("moving_prob_gate", f.moving_prob_gate);
  r.read("length_scale", f.length_scale);
  r.read("time_scale", f.time_scale);
  r.read("speed_scale", f.speed_scale);
  r.finish();
  return f;
}

Json train_to_json(const TrainConfig& t) {
  return {{"steps", t.steps},
          {"batch_size", t.batch_size},
          {"lr", t.adam.lr},
          {"beta1", t.adam.beta1},
          {"beta2", t.adam.beta2},
          {"eps", t.adam.eps},
          {"tp_threshold", t.tp_threshold},
          {"alpha", t.alpha},
          {"beta", t.beta},
          {"delta", t.delta},
          {"holdout_fraction", t.holdout_fraction},
          {"log_every", t.log_every},
          {"seed", t.seed}};
}

TrainConfig train_from_json(const Json& j) {
  TrainConfig t;
  FieldReader r(j, "train");
  r.read("steps", t.steps);
  r.read("batch_size", t.batch_size);
  r.read("lr", t.adam.lr);
  r.read("beta1", t.adam.beta1);
  r.read("beta2", t.adam.beta2);
  r.read("eps", t.adam.eps);
  r.read("tp_threshold", t.tp_threshold);
  r.read("alpha", t.alpha);
  r.read("beta", t.beta);
  r.read("delta", t.delta);
  r.read("holdout_fraction", t.holdout_fraction);
  r.read("log_every", t.log_every);
  r.read("seed", t.seed);
  r.finish();
  return t;
}

std::string_view mode_name(EvalMode m) {
  return m == EvalMode::kNuScenes ? "nuscenes" : "denseradar";
}

Json eval_to_json(const EvalConfig& e) {
  Json slices = Json::object();
  for (const auto& [variable, edges] : e.slice_edges) slices[std::string(to_string(variable))] = edges;
  return {{"mode", mode_name(e.mode)},
          {"distance_thresholds", e.distance_thresholds},
          {"tp_threshold", e.tp_threshold},
          {"iou_threshold", e.iou_threshold},
          {"car_range", e.car_range},
          {"motorcycle_range", e.motorcycle_range},
          {"dense_range", e.dense_range},
          {"range_bands", e.range_bands},
          {"slice_edges", slices}};
}

EvalConfig eval_from_json(const Json& j) {
  EvalConfig e;
  FieldReader r(j, "eval");
  std::string mode;
  r.read("mode", mode);
  if (mode == "nuscenes") {
    e.mode = EvalMode::kNuScenes;
  } else if (mode == "denseradar") {
    e.mode = EvalMode::kDenseRadar;
  } else {
    FieldReader::fail("eval.mode", "must be \"nuscenes\" or \"denseradar\"");
  }
  r.read("distance_thresholds", e.distance_thresholds);
  r.read("tp_threshold", e.tp_threshold);
  r.read("iou_threshold", e.iou_threshold);
  r.read("car_range", e.car_range);
  r.read("motorcycle_range", e.motorcycle_range);
  r.read("dense_range", e.dense_range);
  r.read("range_bands", e.range_bands);
  e.slice_edges.clear();
  FieldReader slices(r.child("slice_edges"), "eval.slice_edges");
  for (SliceVariable v : {SliceVariable::kRange, SliceVariable::kGamma, SliceVariable::kSpeed,
                          SliceVariable::kLidarPoints}) {
    const std::string key(to_string(v));
    if (!r.child("slice_edges").contains(key)) continue;
    std::vector<double> edges;
    slices.read(key.c_str(), edges);
    e.slice_edges[v] = edges;
  }
  slices.finish();
  r.finish();
  return e;
}

}  // namespace

Json sim_to_json(const SimConfig& s) {
  return {{"n_scenes", s.n_scenes},
          {"n_frames", s.n_frames},
          {"frame_interval", s.frame_interval},
          {"sweep_interval", s.sweep_interval},
          {"n_sweeps", s.n_sweeps},
          {"n_radar_cycles", s.n_radar_cycles},
          {"min_actors", s.min_actors},
          {"max_actors", s.max_actors},
          {"min_range", s.min_range},
          {"max_range", s.max_range},
          {"dynamic_fraction", s.dynamic_fraction},
          {"motorcycle_fraction", s.motorcycle_fraction},
          {"min_speed", s.min_speed},
          {"max_speed", s.max_speed},
          {"max_steering", s.max_steering},
          {"keep_points", s.keep_points},
          {"noise", noise_to_json(s.noise)}};
}

SimConfig sim_from_json(const Json& j, const std::string& section) {
  SimConfig s;
  FieldReader r(j, section);
  r.read("n_scenes", s.n_scenes);
  r.read("n_frames", s.n_frames);
  r.read("frame_interval", s.frame_interval);
  r.read("sweep_interval", s.sweep_interval);
  r.read("n_sweeps", s.n_sweeps);
  r.read("n_radar_cycles", s.n_radar_cycles);
  r.read("min_actors", s.min_actors);
  r.read("max_actors", s.max_actors);
  r.read("min_range", s.min_range);
  r.read("max_range", s.max_range);
  r.read("dynamic_fraction", s.dynamic_fraction);
  r.read("motorcycle_fraction", s.motorcycle_fraction);
  r.read("min_speed", s.min_speed);
  r.read("max_speed", s.max_speed);
  r.read("max_steering", s.max_steering);
  r.read("keep_points", s.keep_points);
  s.noise = noise_from_json(r.child("noise"), section + ".noise");
  r.finish();
  return s;
}

}  // namespace detail

void Config::validate() const {
  sim.validate();
  detector.validate();
  voxel.validate();
  fusion.validate();
  train.validate();
  eval.validate();
}

Config parse_config(std::string_view text) {
  detail::Json j;
  try {
    j = detail::Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
  Config cfg;
  detail::FieldReader r(j, "config");
  cfg.sim = detail::sim_from_json(r.child("sim"));
  cfg.detector = detail::detector_from_json(r.child("detector"));
  cfg.voxel = detail::voxel_from_json(r.child("voxel"));
  cfg.fusion = detail::fusion_from_json(r.child("fusion"));
  cfg.train = detail::train_from_json(r.child("train"));
  cfg.eval = detail::eval_from_json(r.child("eval"));
  r.finish();
  cfg.validate();
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigInvalid, "cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const Config& cfg, int indent) {
  const detail::Json j = {{"sim", detail::sim_to_json(cfg.sim)},
                          {"detector", detail::detector_to_json(cfg.detector)},
                          {"voxel", detail::voxel_to_json(cfg.voxel)},
                          {"fusion", detail::fusion_to_json(cfg.fusion)},
                          {"train", detail::train_to_json(cfg.train)},
                          {"eval", detail::eval_to_json(cfg.eval)}};
  return j.dump(indent);
}

std::uint64_t config_hash(const Config& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config_to_json(cfg, -1)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lrfusion
