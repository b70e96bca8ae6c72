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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrfusion/types.hpp"

namespace lrfusion {

// Detections and ground truth of one evaluated frame.
struct EvalFrame {
  std::vector<Detection> dets;
  std::vector<BoxLabel> labels;
};

/// Rotated-rectangle BEV IoU via convex polygon clipping.
double bev_iou(const BevBox& a, const BevBox& b);

// One ranked detection after matching: its confidence and whether it was a
// true positive.
struct RankedMatch {
  double confidence = 0.0;
  bool tp = false;
};

/// All-point interpolated AP: the area under the precision/recall curve
/// after replacing each precision by the running max from the right.
/// Returns 0 when n_labels == 0.
double average_precision(std::vector<RankedMatch> ranked, std::size_t n_labels);

/// AP with TPs defined by BEV center distance <= threshold.
double center_distance_ap(std::span<const Detection> dets, std::span<const BoxLabel> labels,
                          double threshold);
double center_distance_ap(std::span<const EvalFrame> frames, double threshold);

/// AP with TPs defined by BEV IoU >= iou_threshold (greedy, best IoU).
double bev_iou_ap(std::span<const EvalFrame> frames, double iou_threshold);

/// Mean L2 velocity error over TPs at `threshold` meters. With dynamic_only,
/// only TPs whose label is dynamic count. Throws Error(kNoTruePositives).
double ave(std::span<const Detection> dets, std::span<const BoxLabel> labels,
           double threshold = 2.0, bool dynamic_only = false);
double ave(std::span<const EvalFrame> frames, double threshold = 2.0, bool dynamic_only = false);

enum class SliceVariable { kRange, kGamma, kSpeed, kLidarPoints };

std::string_view to_string(SliceVariable v);

/// Slice value of a label, or nullopt when undefined (gamma of a static label).
/// gamma is reported in degrees folded to [0, 90].
std::optional<double> slice_value(const BoxLabel& label, SliceVariable v);

struct SliceBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;    // TPs in the bin
  std::optional<double> ave;  // empty when count == 0
};

struct SliceTable {
  SliceVariable variable = SliceVariable::kRange;
  bool dynamic_only = false;
  std::vector<SliceBin> bins;
};

/// Velocity error per bin of the matched label's slice value. Bins are
/// [edges[i], edges[i+1]); the last bin also includes its upper edge.
SliceTable sliced_eval(std::span<const EvalFrame> frames, SliceVariable variable,
                       std::span<const double> edges, double threshold = 2.0,
                       bool dynamic_only = false);

enum class EvalMode { kNuScenes, kDenseRadar };

struct EvalConfig {
  EvalMode mode = EvalMode::kNuScenes;
  std::vector<double> distance_thresholds = {0.5, 1.0, 2.0, 4.0};
  double tp_threshold = 2.0;
  double iou_threshold = 0.7;
  double car_range = 50.0;
  double motorcycle_range = 40.0;
  double dense_range = 100.0;
  std::vector<double> range_bands = {0.0, 40.0, 70.0, 100.0};
  std::map<SliceVariable, std::vector<double>> slice_edges = {
      {SliceVariable::kRange, {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100}},
      {SliceVariable::kGamma, {0, 10, 20, 30, 40, 50, 60, 70, 80, 90}},
      {SliceVariable::kSpeed, {0, 1, 3, 5, 10, 15, 20, 30}},
      {SliceVariable::kLidarPoints, {0, 10, 25, 50, 100, 200, 500, 1000, 100000}},
  };

  void validate() const;
};

struct ClassReport {
  std::map<double, double> ap_at;  // distance threshold -> AP
  double ap = 0.0;                 // mean over distance thresholds
  double iou_ap = 0.0;             // AP at iou_threshold in BEV
  std::optional<double> ave;
  std::optional<double> adve;
  std::vector<double> band_ap;     // IoU AP per range band
  std::size_t n_labels = 0;
  std::size_t n_dets = 0;
};

struct EvalReport {
  EvalMode mode = EvalMode::kNuScenes;
  std::map<ObjectClass, ClassReport> classes;
  std::vector<SliceTable> slices;
};

/// Labels without any LiDAR or radar return are dropped, then labels and
/// detections are restricted to the per-class evaluation range.
EvalFrame filter_for_class(const EvalFrame& frame, ObjectClass cls, const EvalConfig& cfg);

EvalReport evaluate(std::span<const EvalFrame> frames, const EvalConfig& cfg);

std::string report_to_json(const EvalReport& report, int indent = 2);

}  // namespace lrfusion
