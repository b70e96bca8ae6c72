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

#include "lrfusion/scene_io.hpp"

#include <fstream>

#include "json_convert.hpp"
#include "lrfusion/error.hpp"

namespace lrfusion {
namespace {

using detail::Json;

ObjectClass parse_class(const Json& j) {
  const auto cls = object_class_from_string(j.get<std::string>());
  if (!cls) throw Error(ErrorCode::kIoFailure, "unknown class " + j.get<std::string>());
  return *cls;
}

Json label_to_json(const BoxLabel& b) {
  return {{"x", b.x},
          {"y", b.y},
          {"w", b.w},
          {"l", b.l},
          {"theta", b.theta},
          {"vx", b.v.x},
          {"vy", b.v.y},
          {"dynamic", b.is_dynamic},
          {"actor_id", b.actor_id},
          {"cls", std::string(to_string(b.cls))},
          {"n_lidar", b.num_lidar_points},
          {"n_radar", b.num_radar_points}};
}

BoxLabel label_from_json(const Json& j) {
  BoxLabel b;
  b.x = j.at("x").get<double>();
  b.y = j.at("y").get<double>();
  b.w = j.at("w").get<double>();
  b.l = j.at("l").get<double>();
  b.theta = j.at("theta").get<double>();
  b.v = {j.at("vx").get<double>(), j.at("vy").get<double>()};
  b.is_dynamic = j.at("dynamic").get<bool>();
  b.actor_id = j.at("actor_id").get<std::uint64_t>();
  b.cls = parse_class(j.at("cls"));
  b.num_lidar_points = j.at("n_lidar").get<int>();
  b.num_radar_points = j.at("n_radar").get<int>();
  return b;
}

Json detection_to_json(const Detection& d) {
  return {{"c", d.c},           {"x", d.x},         {"y", d.y},
          {"w", d.w},           {"l", d.l},         {"theta", d.theta},
          {"vx", d.v.x},        {"vy", d.v.y},      {"p_moving", d.p_moving},
          {"cls", std::string(to_string(d.cls))}, {"t", d.t}};
}

Detection detection_from_json(const Json& j) {
  Detection d;
  d.c = j.at("c").get<double>();
  d.x = j.at("x").get<double>();
  d.y = j.at("y").get<double>();
  d.w = j.at("w").get<double>();
  d.l = j.at("l").get<double>();
  d.theta = j.at("theta").get<double>();
  d.v = {j.at("vx").get<double>(), j.at("vy").get<double>()};
  d.p_moving = j.at("p_moving").get<double>();
  d.cls = parse_class(j.at("cls"));
  d.t = j.at("t").get<double>();
  return d;
}

Json detections_to_json(const std::vector<Detection>& dets) {
  Json arr = Json::array();
  for (const Detection& d : dets) arr.push_back(detection_to_json(d));
  return arr;
}

std::vector<Detection> detections_from_json(const Json& j) {
  std::vector<Detection> out;
  for (const Json& d : j) out.push_back(detection_from_json(d));
  return out;
}

Json frame_to_json(const Frame& f) {
  Json labels = Json::array();
  for (const BoxLabel& b : f.labels) labels.push_back(label_to_json(b));
  Json lidar = Json::array();
  for (const LidarPoint& p : f.lidar) lidar.push_back({p.x, p.y, p.z, p.t});
  Json radar = Json::array();
  for (const RadarTarget& q : f.radar) radar.push_back({q.q.x, q.q.y, q.v_par, q.moving ? 1 : 0, q.t});
  Json j = {{"t", f.t}, {"labels", labels}, {"lidar", lidar}, {"radar", radar}};
  if (f.detections) j["detections"] = detections_to_json(*f.detections);
  if (f.refined) j["refined"] = detections_to_json(*f.refined);
  return j;
}

Frame frame_from_json(const Json& j) {
  Frame f;
  f.t = j.at("t").get<double>();
  for (const Json& b : j.at("labels")) f.labels.push_back(label_from_json(b));
  for (const Json& p : j.at("lidar")) {
    f.lidar.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>(),
                       p.at(3).get<double>()});
  }
  for (const Json& q : j.at("radar")) {
    RadarTarget t;
    t.q = {q.at(0).get<double>(), q.at(1).get<double>()};
    t.v_par = q.at(2).get<double>();
    t.moving = q.at(3).get<int>() != 0;
    t.t = q.at(4).get<double>();
    f.radar.push_back(t);
  }
  if (j.contains("detections")) f.detections = detections_from_json(j.at("detections"));
  if (j.contains("refined")) f.refined = detections_from_json(j.at("refined"));
  return f;
}

}  // namespace

std::string scene_to_json(const Scene& scene, const SimConfig& sim) {
  Json frames = Json::array();
  for (const Frame& f : scene.frames) frames.push_back(frame_to_json(f));
  const Json j = {{"config", detail::sim_to_json(sim)}, {"seed", scene.seed}, {"frames", frames}};
  return j.dump();
}

Scene scene_from_json(std::string_view line, SimConfig* sim) {
  try {
    const Json j = Json::parse(line);
    if (sim != nullptr) *sim = detail::sim_from_json(j.at("config"));
    Scene scene;
    scene.seed = j.at("seed").get<std::uint64_t>();
    for (const Json& f : j.at("frames")) scene.frames.push_back(frame_from_json(f));
    return scene;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIoFailure, std::string("malformed scene: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kIoFailure, std::string("malformed scene: ") + e.what());
  }
}

void write_dataset(std::ostream& out, std::span<const Scene> scenes, const SimConfig& sim) {
  for (const Scene& s : scenes) out << scene_to_json(s, sim) << '\n';
  if (!out) throw Error(ErrorCode::kIoFailure, "failed writing dataset");
}

void write_dataset(const std::filesystem::path& path, std::span<const Scene> scenes,
                   const SimConfig& sim) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string() + " for writing");
  write_dataset(out, scenes, sim);
}

Dataset read_dataset(std::istream& in) {
  Dataset ds;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ds.scenes.push_back(scene_from_json(line, first ? &ds.sim : nullptr));
    first = false;
  }
  return ds;
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read dataset " + path.string());
  return read_dataset(in);
}

}  // namespace lrfusion
