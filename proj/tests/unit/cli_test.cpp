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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "lrfusion/config.hpp"
#include "lrfusion/pipeline.hpp"
#include "lrfusion/scene_io.hpp"

namespace lrfusion::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lrfusion_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    Config cfg;
    cfg.sim.n_scenes = 4;
    cfg.train.steps = 20;
    cfg.train.batch_size = 8;
    cfg.train.log_every = 5;
    write_config(cfg, "cfg.json");
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write_config(const Config& cfg, const std::string& name) {
    std::ofstream(dir_ / name) << config_to_json(cfg);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run_tool(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  int simulate(const std::string& out, const std::string& seed = "1") {
    return run_tool({"simulate", "--config", path("cfg.json"), "--seed", seed, "--out", path(out)});
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, SimulateIsReproducible) {
  ASSERT_EQ(simulate("a.jsonl"), kExitOk) << err_.str();
  ASSERT_EQ(simulate("b.jsonl"), kExitOk);
  ASSERT_EQ(simulate("c.jsonl", "2"), kExitOk);
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  EXPECT_NE(slurp(path("a.jsonl")), slurp(path("c.jsonl")));
  const auto m = nlohmann::json::parse(slurp(path("a.jsonl.manifest.json")));
  EXPECT_EQ(m["command"], "simulate");
  EXPECT_EQ(m["seed"], 1);
  EXPECT_EQ(m["n_scenes"], 4);
  EXPECT_EQ(m["config_hash"], hash_hex(config_hash(load_config(path("cfg.json")))));
}

TEST_F(CliTest, SimulateZeroScenes) {
  Config cfg;
  cfg.sim.n_scenes = 0;
  write_config(cfg, "empty.json");
  ASSERT_EQ(run_tool({"simulate", "--config", path("empty.json"), "--out", path("e.jsonl")}),
            kExitOk);
  EXPECT_TRUE(read_dataset(fs::path(path("e.jsonl"))).scenes.empty());
}

TEST_F(CliTest, ConfigErrorsExitWithTwo) {
  auto j = nlohmann::json::parse(slurp(path("cfg.json")));
  j["sim"].erase("n_frames");
  std::ofstream(path("bad.json")) << j.dump();
  EXPECT_EQ(run_tool({"simulate", "--config", path("bad.json"), "--out", path("x.jsonl")}),
            kExitConfig);
  EXPECT_NE(err_.str().find("sim.n_frames"), std::string::npos) << err_.str();
  EXPECT_EQ(run_tool({"simulate", "--config", path("nope.json"), "--out", path("x.jsonl")}),
            kExitConfig);
  EXPECT_EQ(run_tool({"simulate"}), kExitConfig);
  EXPECT_EQ(run_tool({"launch"}), kExitConfig);
  EXPECT_EQ(run_tool({"simulate", "--seed", "minus", "--out", path("x.jsonl")}), kExitConfig);
}

TEST_F(CliTest, HelpSucceeds) {
  EXPECT_EQ(run_tool({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("simulate"), std::string::npos);
}

TEST_F(CliTest, DataErrorsExitWithThree) {
  EXPECT_EQ(run_tool({"train", "--config", path("cfg.json"), "--dataset", path("missing.jsonl"),
                      "--out", path("m.ckpt")}),
            kExitData);
  std::ofstream(path("junk.jsonl")) << "{\"frames\": 3}\n";
  EXPECT_EQ(run_tool({"eval", "--dataset", path("junk.jsonl"), "--mode", "lidar_only"}), kExitData);
}

TEST_F(CliTest, TrainIsDeterministic) {
  ASSERT_EQ(simulate("d.jsonl"), kExitOk);
  const std::vector<std::string> base = {"train", "--config", path("cfg.json"), "--dataset",
                                         path("d.jsonl"), "--seed", "3", "--out"};
  auto with_out = [&](const std::string& o) {
    auto a = base;
    a.push_back(path(o));
    return a;
  };
  ASSERT_EQ(run_tool(with_out("a.ckpt")), kExitOk) << err_.str();
  ASSERT_EQ(run_tool(with_out("b.ckpt")), kExitOk);
  EXPECT_EQ(slurp(path("a.ckpt")), slurp(path("b.ckpt")));
  EXPECT_EQ(slurp(path("a.ckpt.log.csv")), slurp(path("b.ckpt.log.csv")));
  const std::string log = slurp(path("a.ckpt.log.csv"));
  EXPECT_EQ(log.rfind("step,epoch,loss,attn,velo_cls,velo_reg,holdout_ave\n", 0), 0u);
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 21);
  const auto m = nlohmann::json::parse(slurp(path("a.ckpt.manifest.json")));
  EXPECT_EQ(m["seed"], 3);
}

TEST_F(CliTest, EvalModes) {
  ASSERT_EQ(simulate("d.jsonl"), kExitOk);
  EXPECT_EQ(run_tool({"eval", "--dataset", path("d.jsonl"), "--mode", "early"}), kExitConfig);
  EXPECT_EQ(run_tool({"eval", "--dataset", path("d.jsonl"), "--mode", "attention"}), kExitConfig);
  EXPECT_EQ(run_tool({"eval", "--dataset", path("d.jsonl"), "--mode", "attention", "--checkpoint",
                      path("none.ckpt")}),
            kExitConfig);

  ASSERT_EQ(run_tool({"eval", "--config", path("cfg.json"), "--dataset", path("d.jsonl"), "--mode",
                      "lidar_only,heuristic", "--out", path("r.json")}),
            kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("lidar_only"), std::string::npos);
  EXPECT_NE(out_.str().find("heuristic"), std::string::npos);

  // The lidar-only row reports the detector stub on its own.
  const Config cfg = load_config(path("cfg.json"));
  const Dataset ds = read_dataset(fs::path(path("d.jsonl")));
  const auto frames =
      build_eval_frames(ds.scenes, FusionMode::kLidarOnly, cfg.detector, cfg.fusion, nullptr);
  const EvalReport direct = evaluate(frames, cfg.eval);
  const auto j = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_DOUBLE_EQ(j["lidar_only"]["classes"]["car"]["ap"].get<double>(),
                   direct.classes.at(ObjectClass::kCar).ap);
  EXPECT_DOUBLE_EQ(j["lidar_only"]["classes"]["car"]["ave"].get<double>(),
                   *direct.classes.at(ObjectClass::kCar).ave);
}

TEST_F(CliTest, InferAndPlotData) {
  ASSERT_EQ(simulate("d.jsonl"), kExitOk);
  ASSERT_EQ(run_tool({"train", "--config", path("cfg.json"), "--dataset", path("d.jsonl"), "--out",
                      path("m.ckpt")}),
            kExitOk)
      << err_.str();
  ASSERT_EQ(run_tool({"infer", "--config", path("cfg.json"), "--dataset", path("d.jsonl"),
                      "--checkpoint", path("m.ckpt"), "--out", path("inf.jsonl"), "--grid-out",
                      path("grid.txt")}),
            kExitOk)
      << err_.str();
  const Dataset inferred = read_dataset(fs::path(path("inf.jsonl")));
  ASSERT_FALSE(inferred.scenes.empty());
  const Frame& f = inferred.scenes[0].frames[0];
  ASSERT_TRUE(f.detections && f.refined);
  EXPECT_EQ(f.detections->size(), f.refined->size());
  std::ifstream grid(path("grid.txt"));
  const VoxelGrid g = read_grid(grid);
  const VoxelConfig vc = load_config(path("cfg.json")).voxel;
  EXPECT_EQ(g.channels(), vc.n_sweeps * vc.slices() + vc.n_radar_cycles);

  ASSERT_EQ(run_tool({"plot-data", "--config", path("cfg.json"), "--dataset", path("d.jsonl"),
                      "--checkpoint", path("m.ckpt"), "--out", path("slices.csv")}),
            kExitOk)
      << err_.str();
  const std::string csv = slurp(path("slices.csv"));
  EXPECT_EQ(csv.rfind("mode,variable,lo,hi,count,ave\n", 0), 0u);
  EXPECT_NE(csv.find("attention,gamma,80,90,"), std::string::npos);
}

}  // namespace
}  // namespace lrfusion::cli
