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

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "lrfusion/config.hpp"
#include "lrfusion/error.hpp"
#include "lrfusion/eval_metrics.hpp"
#include "lrfusion/nn/checkpoint.hpp"
#include "lrfusion/pipeline.hpp"
#include "lrfusion/scene_io.hpp"
#include "lrfusion/scene_sim.hpp"
#include "lrfusion/training.hpp"
#include "lrfusion/voxelizer.hpp"

namespace lrfusion::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string dataset;
  std::string mode;
  std::string checkpoint;
  std::string grid_out;
  int grid_scene = 0;
  int grid_frame = 0;
};

Config load(const Options& opt) {
  return opt.config.empty() ? Config{} : load_config(opt.config);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
}

fs::path sidecar(const std::string& out, const char* suffix) { return fs::path(out + suffix); }

Json manifest(const char* command, const Config& cfg, std::uint64_t seed) {
  return {{"command", command},
          {"config_hash", hash_hex(config_hash(cfg))},
          {"seed", seed},
          {"config", Json::parse(config_to_json(cfg))}};
}

std::vector<FusionMode> parse_modes(const std::string& spec) {
  if (spec.empty() || spec == "all") {
    return {FusionMode::kLidarOnly, FusionMode::kHeuristic, FusionMode::kAttention};
  }
  std::vector<FusionMode> modes;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) modes.push_back(fusion_mode_from_string(item));
  return modes;
}

std::optional<nn::ParamStore> params_for(const std::vector<FusionMode>& modes,
                                         const Options& opt) {
  if (std::find(modes.begin(), modes.end(), FusionMode::kAttention) == modes.end()) {
    return std::nullopt;
  }
  if (opt.checkpoint.empty()) {
    throw Error(ErrorCode::kCheckpointMissing, "attention mode needs --checkpoint");
  }
  return nn::load_checkpoint(opt.checkpoint);
}

const nn::ParamStore* ptr(const std::optional<nn::ParamStore>& p) {
  return p ? &*p : nullptr;
}

std::string cell(const std::optional<double>& v, int precision) {
  if (!v) return "-";
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << *v;
  return s.str();
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  const Config cfg = load(opt);
  const std::uint64_t seed = opt.seed.value_or(0);
  const auto scenes = generate_dataset(cfg.sim, seed);
  write_dataset(fs::path(opt.out), scenes, cfg.sim);
  Json m = manifest("simulate", cfg, seed);
  m["n_scenes"] = scenes.size();
  write_text(sidecar(opt.out, ".manifest.json"), m.dump(2) + "\n");
  out << "wrote " << scenes.size() << " scenes to " << opt.out << "\n";
  return kExitOk;
}

int cmd_train(const Options& opt, std::ostream& out) {
  Config cfg = load(opt);
  if (opt.seed) cfg.train.seed = *opt.seed;
  const Dataset ds = read_dataset(fs::path(opt.dataset));
  const TrainResult result = train_late_fusion(ds.scenes, cfg.detector, cfg.fusion, cfg.train);
  nn::save_checkpoint(opt.out, result.params);

  std::ostringstream log;
  log << std::setprecision(17);
  log << "step,epoch,loss,attn,velo_cls,velo_reg,holdout_ave\n";
  for (const LossRecord& r : result.curve) {
    log << r.step << ',' << r.epoch << ',' << r.total << ',' << r.attn << ',' << r.velo_cls << ','
        << r.velo_reg << ',';
    if (r.holdout_ave) log << *r.holdout_ave;
    log << '\n';
  }
  write_text(sidecar(opt.out, ".log.csv"), log.str());
  Json m = manifest("train", cfg, cfg.train.seed);
  m["dataset"] = opt.dataset;
  m["steps"] = result.curve.size();
  write_text(sidecar(opt.out, ".manifest.json"), m.dump(2) + "\n");
  out << "trained " << result.curve.size() << " steps; checkpoint " << opt.out << "\n";
  if (!result.curve.empty()) {
    const LossRecord& last = result.curve.back();
    out << "final batch attention loss " << last.attn;
    if (last.holdout_ave) out << ", held-out AVE " << *last.holdout_ave;
    out << "\n";
  }
  return kExitOk;
}

int cmd_eval(const Options& opt, std::ostream& out) {
  const Config cfg = load(opt);
  const auto modes = parse_modes(opt.mode);
  const auto params = params_for(modes, opt);
  const Dataset ds = read_dataset(fs::path(opt.dataset));

  std::vector<std::pair<FusionMode, EvalReport>> reports;
  for (FusionMode mode : modes) {
    const auto frames =
        build_eval_frames(ds.scenes, mode, cfg.detector, cfg.fusion, ptr(params));
    reports.emplace_back(mode, evaluate(frames, cfg.eval));
  }

  const std::vector<std::string> columns = {"car AP", "car AVE", "car ADVE",
                                            "moto AP", "moto AVE", "moto ADVE"};
  out << std::left << std::setw(12) << "mode" << std::right;
  for (const std::string& c : columns) out << std::setw(11) << c;
  out << "\n";
  for (const auto& [mode, report] : reports) {
    out << std::left << std::setw(12) << to_string(mode) << std::right;
    for (ObjectClass cls : {ObjectClass::kCar, ObjectClass::kMotorcycle}) {
      const ClassReport& cr = report.classes.at(cls);
      out << std::setw(11) << cell(cr.ap, 4) << std::setw(11) << cell(cr.ave, 4) << std::setw(11)
          << cell(cr.adve, 4);
    }
    out << "\n";
  }

  if (!opt.out.empty()) {
    Json j = Json::object();
    for (const auto& [mode, report] : reports) {
      j[std::string(to_string(mode))] = Json::parse(report_to_json(report));
    }
    write_text(opt.out, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_infer(const Options& opt, std::ostream& out) {
  const Config cfg = load(opt);
  const FusionMode mode = fusion_mode_from_string(opt.mode.empty() ? "attention" : opt.mode);
  const auto params = params_for({mode}, opt);
  Dataset ds = read_dataset(fs::path(opt.dataset));
  for (Scene& scene : ds.scenes) {
    for (std::size_t f = 0; f < scene.frames.size(); ++f) {
      const auto dets = frame_detections(scene, f, cfg.detector);
      scene.frames[f].refined =
          apply_fusion(mode, dets, scene.frames[f].radar, cfg.fusion, ptr(params));
      scene.frames[f].detections = dets;
    }
  }
  write_dataset(fs::path(opt.out), ds.scenes, ds.sim);
  out << "wrote refined detections for " << ds.scenes.size() << " scenes to " << opt.out << "\n";

  if (!opt.grid_out.empty()) {
    const auto s = static_cast<std::size_t>(opt.grid_scene);
    const auto f = static_cast<std::size_t>(opt.grid_frame);
    if (s >= ds.scenes.size() || f >= ds.scenes[s].frames.size()) {
      throw Error(ErrorCode::kInvalidArgument, "--grid-scene/--grid-frame out of range");
    }
    const Frame& frame = ds.scenes[s].frames[f];
    const VoxelGrid grid = fuse_early(lidar_occupancy(frame.lidar, cfg.voxel, frame.t),
                                      radar_occupancy(frame.radar, cfg.voxel, frame.t));
    std::ofstream g(opt.grid_out);
    if (!g) throw Error(ErrorCode::kIoFailure, "cannot write " + opt.grid_out);
    write_grid(g, grid);
    out << "wrote " << grid.channels() << "-channel grid to " << opt.grid_out << "\n";
  }
  return kExitOk;
}

int cmd_plot_data(const Options& opt, std::ostream& out) {
  const Config cfg = load(opt);
  const auto modes = parse_modes(opt.mode);
  const auto params = params_for(modes, opt);
  const Dataset ds = read_dataset(fs::path(opt.dataset));
  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "mode,variable,lo,hi,count,ave\n";
  for (FusionMode mode : modes) {
    const auto frames =
        build_eval_frames(ds.scenes, mode, cfg.detector, cfg.fusion, ptr(params));
    const EvalReport report = evaluate(frames, cfg.eval);
    for (const SliceTable& t : report.slices) {
      for (const SliceBin& b : t.bins) {
        csv << to_string(mode) << ',' << to_string(t.variable) << ',' << b.lo << ',' << b.hi << ','
            << b.count << ',';
        if (b.ave) csv << *b.ave;
        csv << '\n';
      }
    }
  }
  write_text(opt.out, csv.str());
  out << "wrote slice table to " << opt.out << "\n";
  return kExitOk;
}

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigInvalid:
    case ErrorCode::kCheckpointMissing:
    case ErrorCode::kInvalidArgument:
      return kExitConfig;
    default:
      return kExitData;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LiDAR-radar late fusion toolkit"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON config; built-in defaults when omitted");
    sub->add_option("--seed", opt.seed, "Seed override");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset");
  add_common(simulate);
  simulate->add_option("--out", opt.out, "Dataset path (newline-delimited JSON)")->required();

  CLI::App* train = app.add_subcommand("train", "Train the matching network");
  add_common(train);
  train->add_option("--dataset", opt.dataset, "Dataset path")->required();
  train->add_option("--out", opt.out, "Checkpoint path")->required();

  CLI::App* eval = app.add_subcommand("eval", "Evaluate fusion modes");
  add_common(eval);
  eval->add_option("--dataset", opt.dataset, "Dataset path")->required();
  eval->add_option("--mode", opt.mode, "Comma-separated modes or 'all'")->default_str("all");
  eval->add_option("--checkpoint", opt.checkpoint, "Checkpoint for attention mode");
  eval->add_option("--out", opt.out, "Optional JSON report path");

  CLI::App* infer = app.add_subcommand("infer", "Write detections and refined detections");
  add_common(infer);
  infer->add_option("--dataset", opt.dataset, "Dataset path")->required();
  infer->add_option("--mode", opt.mode, "Fusion mode")->default_str("attention");
  infer->add_option("--checkpoint", opt.checkpoint, "Checkpoint for attention mode");
  infer->add_option("--out", opt.out, "Output dataset path")->required();
  infer->add_option("--grid-out", opt.grid_out, "Dump the early-fusion grid of one frame");
  infer->add_option("--grid-scene", opt.grid_scene, "Scene index for --grid-out");
  infer->add_option("--grid-frame", opt.grid_frame, "Frame index for --grid-out");

  CLI::App* plot = app.add_subcommand("plot-data", "Write per-slice velocity errors as CSV");
  add_common(plot);
  plot->add_option("--dataset", opt.dataset, "Dataset path")->required();
  plot->add_option("--mode", opt.mode, "Comma-separated modes or 'all'")->default_str("all");
  plot->add_option("--checkpoint", opt.checkpoint, "Checkpoint for attention mode");
  plot->add_option("--out", opt.out, "CSV path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opt, out);
    if (train->parsed()) return cmd_train(opt, out);
    if (eval->parsed()) return cmd_eval(opt, out);
    if (infer->parsed()) return cmd_infer(opt, out);
    if (plot->parsed()) return cmd_plot_data(opt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_status(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace lrfusion::cli
