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

#include <cmath>
#include <numbers>
#include <random>

#include "expect_error.hpp"
#include "generators.hpp"
#include "lrfusion/eval_metrics.hpp"
#include "oracles.hpp"

namespace lrfusion {
namespace {

using testing::uniform;

Detection det_at(double x, double y, double c, Vec2 v = {}) {
  Detection d;
  d.x = x;
  d.y = y;
  d.c = c;
  d.v = v;
  return d;
}

BoxLabel label_at(double x, double y, Vec2 v = {}, bool dynamic = false) {
  BoxLabel l;
  l.x = x;
  l.y = y;
  l.v = v;
  l.is_dynamic = dynamic;
  l.num_lidar_points = 10;
  return l;
}

TEST(AveragePrecision, RankedExamples) {
  EXPECT_DOUBLE_EQ(average_precision({{0.9, true}, {0.8, true}}, 2), 1.0);
  EXPECT_NEAR(average_precision({{0.9, true}, {0.8, false}, {0.7, true}}, 2), 0.5 + 0.5 * 2.0 / 3.0,
              1e-15);
  EXPECT_DOUBLE_EQ(average_precision({{0.9, false}, {0.8, true}}, 1), 0.5);
  EXPECT_DOUBLE_EQ(average_precision({{0.9, true}}, 4), 0.25);
  EXPECT_DOUBLE_EQ(average_precision({{0.9, true}}, 0), 0.0);
  EXPECT_DOUBLE_EQ(average_precision({}, 3), 0.0);
  // Ranking is by confidence, not input order.
  EXPECT_DOUBLE_EQ(average_precision({{0.1, false}, {0.9, true}}, 1), 1.0);
}

TEST(AveragePrecision, CenterDistanceExamples) {
  const std::vector<BoxLabel> labels = {label_at(0, 0), label_at(10, 0)};
  const std::vector<Detection> dets = {det_at(0.5, 0, 0.9), det_at(30, 0, 0.8),
                                       det_at(10, 1.0, 0.7)};
  EXPECT_NEAR(center_distance_ap(dets, labels, 1.0), 0.5 + 0.5 * 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(center_distance_ap(dets, labels, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(center_distance_ap(dets, labels, 0.4), 0.0);
}

TEST(AveragePrecision, DuplicateDetectionIsFalsePositive) {
  const std::vector<BoxLabel> labels = {label_at(0, 0)};
  const std::vector<Detection> dets = {det_at(0.1, 0, 0.9), det_at(0, 0, 0.8)};
  EXPECT_DOUBLE_EQ(center_distance_ap(dets, labels, 2.0), 1.0);
  const std::vector<Detection> flipped = {det_at(0.1, 0, 0.5), det_at(3, 0, 0.8)};
  EXPECT_DOUBLE_EQ(center_distance_ap(flipped, labels, 2.0), 0.5);
}

TEST(AveragePrecision, MatchesBruteForceOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<BoxLabel> labels;
    std::vector<Detection> dets;
    const int nl = testing::uniform_int(rng, 0, 8);
    const int nd = testing::uniform_int(rng, 0, 12);
    for (int i = 0; i < nl; ++i) labels.push_back(label_at(uniform(rng, -10, 10), uniform(rng, -10, 10)));
    for (int i = 0; i < nd; ++i) {
      dets.push_back(det_at(uniform(rng, -10, 10), uniform(rng, -10, 10), uniform(rng, 0, 1)));
    }
    const double t = uniform(rng, 0.5, 4);
    EXPECT_EQ(center_distance_ap(dets, labels, t), testing::brute_force_ap(dets, labels, t))
        << "trial " << trial;
  }
}

TEST(AveragePrecision, MonotoneInThreshold) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<BoxLabel> labels;
    std::vector<Detection> dets;
    for (int i = 0; i < 5; ++i) {
      const BoxLabel l = label_at(uniform(rng, -30, 30), uniform(rng, -30, 30));
      labels.push_back(l);
      // One noisy detection per label so distances are spread out.
      dets.push_back(det_at(l.x + uniform(rng, -3, 3), l.y + uniform(rng, -3, 3), uniform(rng, 0, 1)));
    }
    double prev = 0;
    for (double t : {0.5, 1.0, 2.0, 4.0}) {
      const double ap = center_distance_ap(dets, labels, t);
      EXPECT_GE(ap, prev);
      prev = ap;
    }
  }
}

TEST(BevIou, Examples) {
  const BevBox a{0, 0, 2, 2, 0};
  EXPECT_NEAR(bev_iou(a, a), 1.0, 1e-12);
  EXPECT_NEAR(bev_iou(a, {1, 0, 2, 2, 0}), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(bev_iou(a, {5, 0, 2, 2, 0}), 0.0);
  EXPECT_NEAR(bev_iou(a, {0, 0, 2, 2, std::numbers::pi / 2}), 1.0, 1e-12);
  // w and l swap under a quarter turn.
  EXPECT_NEAR(bev_iou({0, 0, 1, 4, 0}, {0, 0, 4, 1, std::numbers::pi / 2}), 1.0, 1e-12);
  EXPECT_NEAR(bev_iou({0, 0, 1, 4, 0}, {0, 0, 1, 4, std::numbers::pi / 2}), 1.0 / 7.0, 1e-12);
  // Touching edges have zero overlap.
  EXPECT_NEAR(bev_iou(a, {2, 0, 2, 2, 0}), 0.0, 1e-12);
  // Nested boxes.
  EXPECT_NEAR(bev_iou(a, {0, 0, 1, 1, 0.3}), 0.25, 1e-12);
}

TEST(BevIou, SymmetricBoundedAndRigidInvariant) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 2000; ++i) {
    const BevBox a = testing::random_box(rng);
    const BevBox b = testing::random_box(rng);
    const double iou = bev_iou(a, b);
    EXPECT_GE(iou, 0.0);
    EXPECT_LE(iou, 1.0);
    EXPECT_NEAR(iou, bev_iou(b, a), 1e-12);
    const double ang = uniform(rng, -3, 3);
    const Vec2 shift{uniform(rng, -50, 50), uniform(rng, -50, 50)};
    auto move = [&](const BevBox& x) {
      const Vec2 c = rotate({x.x, x.y}, ang) + shift;
      return BevBox{c.x, c.y, x.w, x.l, x.theta + ang};
    };
    EXPECT_NEAR(iou, bev_iou(move(a), move(b)), 1e-9);
  }
}

TEST(BevIou, AgreesWithMonteCarlo) {
  std::mt19937_64 rng(24);
  for (int i = 0; i < 20; ++i) {
    const BevBox a = testing::random_box(rng);
    const BevBox b = testing::random_box(rng);
    EXPECT_NEAR(bev_iou(a, b), testing::monte_carlo_iou(a, b, 200000, 100 + i), 0.01);
  }
}

TEST(BevIouAp, PerfectBoxes) {
  EvalFrame f;
  f.labels = {label_at(0, 0), label_at(10, 0)};
  f.dets = {det_at(0, 0, 0.9), det_at(10.6, 0, 0.8)};
  const std::vector<EvalFrame> frames = {f};
  // The second detection only overlaps by 0.4 / 1.6.
  EXPECT_DOUBLE_EQ(bev_iou_ap(frames, 0.7), 0.5);
  EXPECT_DOUBLE_EQ(bev_iou_ap(frames, 0.2), 1.0);
}

TEST(Ave, ExamplesAndDynamicSubset) {
  const std::vector<BoxLabel> labels = {label_at(0, 0, {0, 0}, false), label_at(10, 0, {5, 0}, true)};
  const std::vector<Detection> dets = {det_at(0, 0, 0.9, {3, 4}), det_at(10, 0, 0.8, {6, 0})};
  EXPECT_DOUBLE_EQ(ave(dets, labels), 3.0);
  EXPECT_DOUBLE_EQ(ave(dets, labels, 2.0, true), 1.0);
  const std::vector<Detection> one = {dets[0]};
  EXPECT_DOUBLE_EQ(ave(one, labels), 5.0);
  EXPECT_ERROR_CODE(ave(one, labels, 2.0, true), ErrorCode::kNoTruePositives);
  EXPECT_ERROR_CODE(ave(std::vector<Detection>{}, labels), ErrorCode::kNoTruePositives);
}

TEST(Slices, GammaValues) {
  EXPECT_NEAR(*slice_value(label_at(10, 0, {5, 0}), SliceVariable::kGamma), 0.0, 1e-9);
  EXPECT_NEAR(*slice_value(label_at(10, 0, {-5, 0}), SliceVariable::kGamma), 0.0, 1e-9);
  EXPECT_NEAR(*slice_value(label_at(10, 0, {0, 5}), SliceVariable::kGamma), 90.0, 1e-9);
  EXPECT_NEAR(*slice_value(label_at(10, 0, {-5, 5}), SliceVariable::kGamma), 45.0, 1e-9);
  EXPECT_FALSE(slice_value(label_at(10, 0, {0.05, 0}), SliceVariable::kGamma).has_value());
  EXPECT_DOUBLE_EQ(*slice_value(label_at(3, 4), SliceVariable::kRange), 5.0);
  EXPECT_DOUBLE_EQ(*slice_value(label_at(3, 4, {0, 2}), SliceVariable::kSpeed), 2.0);
  EXPECT_DOUBLE_EQ(*slice_value(label_at(3, 4), SliceVariable::kLidarPoints), 10.0);
}

TEST(Slices, BinsAreHalfOpenWithClosedEnd) {
  EvalFrame f;
  // Ranges 10, 20 and 30 against edges {10, 20, 30}.
  for (double r : {10.0, 20.0, 30.0}) {
    f.labels.push_back(label_at(r, 0));
    f.dets.push_back(det_at(r, 0, 0.5, {r / 10, 0}));
  }
  f.labels.push_back(label_at(31, 0));
  f.dets.push_back(det_at(31, 0, 0.5, {9, 0}));
  const std::vector<EvalFrame> frames = {f};
  const std::vector<double> edges = {10, 20, 30};
  const SliceTable t = sliced_eval(frames, SliceVariable::kRange, edges);
  ASSERT_EQ(t.bins.size(), 2u);
  EXPECT_EQ(t.bins[0].count, 1u);
  EXPECT_DOUBLE_EQ(*t.bins[0].ave, 1.0);
  EXPECT_EQ(t.bins[1].count, 2u);
  EXPECT_DOUBLE_EQ(*t.bins[1].ave, 2.5);
  EXPECT_ERROR_CODE(sliced_eval(frames, SliceVariable::kRange, std::vector<double>{5}),
                    ErrorCode::kInvalidArgument);
}

TEST(Slices, CountsSumToTruePositives) {
  std::mt19937_64 rng(25);
  EvalFrame f;
  for (int i = 0; i < 200; ++i) {
    const BoxLabel l = label_at(uniform(rng, -60, 60), uniform(rng, -60, 60),
                                testing::random_unit(rng) * uniform(rng, 0.2, 20), true);
    f.labels.push_back(l);
    f.dets.push_back(det_at(l.x, l.y, uniform(rng, 0, 1), l.v));
  }
  const std::vector<EvalFrame> frames = {f};
  const EvalConfig cfg;
  const auto& edges = cfg.slice_edges.at(SliceVariable::kGamma);
  const SliceTable t = sliced_eval(frames, SliceVariable::kGamma, edges);
  std::size_t total = 0;
  for (const SliceBin& b : t.bins) total += b.count;
  EXPECT_EQ(total, f.labels.size());
}

TEST(Evaluate, FiltersByClassRangeAndObservation) {
  EvalFrame f;
  f.labels = {label_at(45, 0), label_at(10, 0)};
  f.labels[0].cls = ObjectClass::kMotorcycle;  // beyond 40 m for motorcycles
  BoxLabel unseen = label_at(20, 0);
  unseen.num_lidar_points = 0;
  f.labels.push_back(unseen);
  f.dets = {det_at(10, 0, 0.9)};
  EvalConfig cfg;
  const EvalFrame car = filter_for_class(f, ObjectClass::kCar, cfg);
  EXPECT_EQ(car.labels.size(), 1u);
  EXPECT_EQ(filter_for_class(f, ObjectClass::kMotorcycle, cfg).labels.size(), 0u);
  cfg.mode = EvalMode::kDenseRadar;
  EXPECT_EQ(filter_for_class(f, ObjectClass::kMotorcycle, cfg).labels.size(), 1u);

  const std::vector<EvalFrame> frames = {f};
  const EvalReport r = evaluate(frames, EvalConfig{});
  const ClassReport& c = r.classes.at(ObjectClass::kCar);
  EXPECT_EQ(c.n_labels, 1u);
  EXPECT_DOUBLE_EQ(c.ap, 1.0);
  EXPECT_DOUBLE_EQ(*c.ave, 0.0);
  EXPECT_FALSE(c.adve.has_value());
  EXPECT_EQ(c.band_ap.size(), 3u);
  EXPECT_FALSE(r.classes.at(ObjectClass::kMotorcycle).ave.has_value());
  EXPECT_EQ(r.slices.size(), 4u);
  EXPECT_NE(report_to_json(r).find("\"car\""), std::string::npos);
}

TEST(Evaluate, RejectsBadConfig) {
  EvalConfig cfg;
  cfg.distance_thresholds.clear();
  EXPECT_ERROR_CODE(evaluate(std::vector<EvalFrame>{}, cfg), ErrorCode::kConfigInvalid);
  cfg = EvalConfig{};
  cfg.iou_threshold = 1.5;
  EXPECT_ERROR_CODE(cfg.validate(), ErrorCode::kConfigInvalid);
}

}  // namespace
}  // namespace lrfusion
