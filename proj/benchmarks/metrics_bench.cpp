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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lrfusion/eval_metrics.hpp"

namespace {

void BM_BevIou(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-2, 2), size(1, 5), ang(-3, 3);
  std::vector<lrfusion::BevBox> boxes;
  for (int i = 0; i < 256; ++i) boxes.push_back({pos(rng), pos(rng), size(rng), size(rng), ang(rng)});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lrfusion::bev_iou(boxes[i % 256], boxes[(i + 1) % 256]));
    ++i;
  }
}
BENCHMARK(BM_BevIou);

void BM_CenterDistanceAp(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(-50, 50), conf(0, 1);
  const auto n = static_cast<int>(state.range(0));
  std::vector<lrfusion::Detection> dets(static_cast<std::size_t>(n));
  std::vector<lrfusion::BoxLabel> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    labels[static_cast<std::size_t>(i)].x = pos(rng);
    labels[static_cast<std::size_t>(i)].y = pos(rng);
    dets[static_cast<std::size_t>(i)].x = labels[static_cast<std::size_t>(i)].x + conf(rng);
    dets[static_cast<std::size_t>(i)].y = labels[static_cast<std::size_t>(i)].y;
    dets[static_cast<std::size_t>(i)].c = conf(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(lrfusion::center_distance_ap(dets, labels, 2.0));
}
BENCHMARK(BM_CenterDistanceAp)->Arg(16)->Arg(128);

}  // namespace
