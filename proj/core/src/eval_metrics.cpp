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

#include "lrfusion/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "lrfusion/detector_stub.hpp"
#include "lrfusion/error.hpp"

namespace lrfusion {
namespace {

using Polygon = std::vector<Vec2>;

double polygon_area(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return std::abs(twice) / 2.0;
}

// Keeps the part of `subject` on the left of the directed edge a -> b.
Polygon clip_half_plane(const Polygon& subject, const Vec2& a, const Vec2& b) {
  Polygon out;
  const Vec2 e = b - a;
  auto side = [&](const Vec2& p) { return cross(e, p - a); };
  for (std::size_t i = 0; i < subject.size(); ++i) {
    const Vec2& cur = subject[i];
    const Vec2& nxt = subject[(i + 1) % subject.size()];
    const double sc = side(cur);
    const double sn = side(nxt);
    if (sc >= 0) out.push_back(cur);
    if ((sc >= 0) != (sn >= 0)) {
      const double t = sc / (sc - sn);
      out.push_back(cur + (nxt - cur) * t);
    }
  }
  return out;
}

// Greedy confidence-ordered matching with a generic affinity: each detection
// takes the unmatched label with the best affinity that passes `accept`.
template <typename Affinity, typename Better, typename Accept>
std::vector<std::optional<std::size_t>> greedy_match(std::span<const Detection> dets,
                                                     std::span<const BoxLabel> labels,
                                                     Affinity affinity, Better better,
                                                     Accept accept) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].c > dets[b].c; });
  std::vector<std::optional<std::size_t>> match(dets.size());
  std::vector<bool> taken(labels.size(), false);
  for (std::size_t i : order) {
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (taken[j]) continue;
      const double s = affinity(dets[i], labels[j]);
      if (!accept(s)) continue;
      if (!best || better(s, best_score)) {
        best = j;
        best_score = s;
      }
    }
    if (best) {
      taken[*best] = true;
      match[i] = best;
    }
  }
  return match;
}

std::vector<RankedMatch> ranked_by_distance(const EvalFrame& f, double threshold) {
  std::vector<RankedMatch> out;
  const auto matches = match_to_labels(f.dets, f.labels, threshold);
  for (const LabelMatch& m : matches) out.push_back({f.dets[m.det].c, m.label.has_value()});
  return out;
}

std::vector<RankedMatch> ranked_by_iou(const EvalFrame& f, double iou_threshold) {
  const auto match = greedy_match(
      std::span<const Detection>(f.dets), std::span<const BoxLabel>(f.labels),
      [](const Detection& d, const BoxLabel& l) { return bev_iou(d.box(), l.box()); },
      [](double a, double b) { return a > b; },
      [iou_threshold](double s) { return s >= iou_threshold; });
  std::vector<RankedMatch> out;
  for (std::size_t i = 0; i < f.dets.size(); ++i) out.push_back({f.dets[i].c, match[i].has_value()});
  return out;
}

template <typename Ranker>
double pooled_ap(std::span<const EvalFrame> frames, Ranker ranker) {
  std::vector<RankedMatch> all;
  std::size_t n_labels = 0;
  for (const EvalFrame& f : frames) {
    auto r = ranker(f);
    all.insert(all.end(), r.begin(), r.end());
    n_labels += f.labels.size();
  }
  return average_precision(std::move(all), n_labels);
}

struct ErrorSum {
  double sum = 0.0;
  std::size_t count = 0;
};

template <typename Visit>
void for_each_tp(std::span<const EvalFrame> frames, double threshold, bool dynamic_only,
                 Visit visit) {
  for (const EvalFrame& f : frames) {
    for (const LabelMatch& m : match_to_labels(f.dets, f.labels, threshold)) {
      if (!m.label) continue;
      const BoxLabel& label = f.labels[*m.label];
      if (dynamic_only && !label.is_dynamic) continue;
      visit(f.dets[m.det], label);
    }
  }
}

double range_of(const Vec2& p) { return norm(p); }

std::vector<EvalFrame> restrict_to_band(std::span<const EvalFrame> frames, double lo, double hi) {
  std::vector<EvalFrame> out;
  for (const EvalFrame& f : frames) {
    EvalFrame g;
    for (const Detection& d : f.dets) {
      const double r = range_of(d.center());
      if (r >= lo && r < hi) g.dets.push_back(d);
    }
    for (const BoxLabel& l : f.labels) {
      const double r = range_of(l.center());
      if (r >= lo && r < hi) g.labels.push_back(l);
    }
    out.push_back(std::move(g));
  }
  return out;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

double bev_iou(const BevBox& a, const BevBox& b) {
  const auto ca = box_corners(a);
  const auto cb = box_corners(b);
  Polygon inter(ca.begin(), ca.end());
  for (std::size_t i = 0; i < cb.size() && !inter.empty(); ++i) {
    inter = clip_half_plane(inter, cb[i], cb[(i + 1) % cb.size()]);
  }
  const double area_i = inter.size() >= 3 ? polygon_area(inter) : 0.0;
  const double area_a = a.w * a.l;
  const double area_b = b.w * b.l;
  const double uni = area_a + area_b - area_i;
  if (!(uni > 0)) return 0.0;
  return std::clamp(area_i / uni, 0.0, 1.0);
}

double average_precision(std::vector<RankedMatch> ranked, std::size_t n_labels) {
  if (n_labels == 0 || ranked.empty()) return 0.0;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedMatch& a, const RankedMatch& b) {
                     return a.confidence > b.confidence;
                   });
  std::vector<double> precision(ranked.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (ranked[k].tp) ++tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  for (std::size_t k = ranked.size() - 1; k-- > 0;) {
    precision[k] = std::max(precision[k], precision[k + 1]);
  }
  // Area under the interpolated curve, summed over the recall steps.
  const double n = static_cast<double>(n_labels);
  double ap = 0.0;
  double prev_recall = 0.0;
  tp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (ranked[k].tp) ++tp;
    const double recall = static_cast<double>(tp) / n;
    ap += (recall - prev_recall) * precision[k];
    prev_recall = recall;
  }
  return ap;
}

double center_distance_ap(std::span<const Detection> dets, std::span<const BoxLabel> labels,
                          double threshold) {
  const EvalFrame f{{dets.begin(), dets.end()}, {labels.begin(), labels.end()}};
  return center_distance_ap(std::span<const EvalFrame>(&f, 1), threshold);
}

double center_distance_ap(std::span<const EvalFrame> frames, double threshold) {
  return pooled_ap(frames, [threshold](const EvalFrame& f) { return ranked_by_distance(f, threshold); });
}

double bev_iou_ap(std::span<const EvalFrame> frames, double iou_threshold) {
  return pooled_ap(frames,
                   [iou_threshold](const EvalFrame& f) { return ranked_by_iou(f, iou_threshold); });
}

double ave(std::span<const Detection> dets, std::span<const BoxLabel> labels, double threshold,
           bool dynamic_only) {
  const EvalFrame f{{dets.begin(), dets.end()}, {labels.begin(), labels.end()}};
  return ave(std::span<const EvalFrame>(&f, 1), threshold, dynamic_only);
}

double ave(std::span<const EvalFrame> frames, double threshold, bool dynamic_only) {
  ErrorSum acc;
  for_each_tp(frames, threshold, dynamic_only, [&](const Detection& d, const BoxLabel& l) {
    acc.sum += norm(d.v - l.v);
    ++acc.count;
  });
  if (acc.count == 0) {
    throw Error(ErrorCode::kNoTruePositives, "velocity error is undefined without true positives");
  }
  return acc.sum / static_cast<double>(acc.count);
}

std::string_view to_string(SliceVariable v) {
  switch (v) {
    case SliceVariable::kRange: return "range";
    case SliceVariable::kGamma: return "gamma";
    case SliceVariable::kSpeed: return "speed";
    case SliceVariable::kLidarPoints: return "lidar_points";
  }
  return "range";
}

std::optional<double> slice_value(const BoxLabel& label, SliceVariable v) {
  switch (v) {
    case SliceVariable::kRange:
      return norm(label.center());
    case SliceVariable::kGamma: {
      if (norm(label.v) <= 0.1 || norm(label.center()) <= kGeomEps) return std::nullopt;
      const double c = std::abs(cos_angle(label.v, radial_unit(label.center())));
      return rad_to_deg(std::acos(std::min(1.0, c)));
    }
    case SliceVariable::kSpeed:
      return norm(label.v);
    case SliceVariable::kLidarPoints:
      return static_cast<double>(label.num_lidar_points);
  }
  return std::nullopt;
}

SliceTable sliced_eval(std::span<const EvalFrame> frames, SliceVariable variable,
                       std::span<const double> edges, double threshold, bool dynamic_only) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
    throw Error(ErrorCode::kInvalidArgument, "slice edges must be ascending with >= 2 entries");
  }
  SliceTable table;
  table.variable = variable;
  table.dynamic_only = dynamic_only;
  const std::size_t n_bins = edges.size() - 1;
  std::vector<ErrorSum> acc(n_bins);
  for_each_tp(frames, threshold, dynamic_only, [&](const Detection& d, const BoxLabel& l) {
    const auto value = slice_value(l, variable);
    if (!value) return;
    auto it = std::upper_bound(edges.begin(), edges.end(), *value);
    std::size_t bin = static_cast<std::size_t>(it - edges.begin());
    if (bin == 0) return;
    bin -= 1;
    if (bin >= n_bins) {
      if (*value != edges.back()) return;
      bin = n_bins - 1;
    }
    acc[bin].sum += norm(d.v - l.v);
    acc[bin].count += 1;
  });
  for (std::size_t b = 0; b < n_bins; ++b) {
    SliceBin bin{edges[b], edges[b + 1], acc[b].count, std::nullopt};
    if (acc[b].count > 0) bin.ave = acc[b].sum / static_cast<double>(acc[b].count);
    table.bins.push_back(bin);
  }
  return table;
}

void EvalConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kConfigInvalid, what);
  };
  require(!distance_thresholds.empty(), "eval.distance_thresholds must not be empty");
  for (double t : distance_thresholds) require(t > 0, "eval.distance_thresholds must be > 0");
  require(tp_threshold > 0, "eval.tp_threshold must be > 0");
  require(iou_threshold > 0 && iou_threshold <= 1, "eval.iou_threshold must be in (0, 1]");
  require(car_range > 0 && motorcycle_range > 0 && dense_range > 0, "eval ranges must be > 0");
  require(range_bands.size() >= 2 && std::is_sorted(range_bands.begin(), range_bands.end()),
          "eval.range_bands must be ascending with >= 2 entries");
}

EvalFrame filter_for_class(const EvalFrame& frame, ObjectClass cls, const EvalConfig& cfg) {
  double max_range = cfg.dense_range;
  if (cfg.mode == EvalMode::kNuScenes) {
    max_range = cls == ObjectClass::kCar ? cfg.car_range : cfg.motorcycle_range;
  }
  EvalFrame out;
  for (const Detection& d : frame.dets) {
    if (d.cls == cls && range_of(d.center()) <= max_range) out.dets.push_back(d);
  }
  for (const BoxLabel& l : frame.labels) {
    if (l.cls != cls || range_of(l.center()) > max_range) continue;
    if (l.num_lidar_points == 0 && l.num_radar_points == 0) continue;
    out.labels.push_back(l);
  }
  return out;
}

EvalReport evaluate(std::span<const EvalFrame> frames, const EvalConfig& cfg) {
  cfg.validate();
  EvalReport report;
  report.mode = cfg.mode;
  std::vector<EvalFrame> all_filtered;
  for (ObjectClass cls : {ObjectClass::kCar, ObjectClass::kMotorcycle}) {
    std::vector<EvalFrame> filtered;
    filtered.reserve(frames.size());
    for (const EvalFrame& f : frames) filtered.push_back(filter_for_class(f, cls, cfg));

    ClassReport cr;
    for (const EvalFrame& f : filtered) {
      cr.n_labels += f.labels.size();
      cr.n_dets += f.dets.size();
    }
    double sum = 0.0;
    for (double t : cfg.distance_thresholds) {
      const double ap = center_distance_ap(filtered, t);
      cr.ap_at[t] = ap;
      sum += ap;
    }
    cr.ap = sum / static_cast<double>(cfg.distance_thresholds.size());
    cr.iou_ap = bev_iou_ap(filtered, cfg.iou_threshold);
    for (std::size_t b = 0; b + 1 < cfg.range_bands.size(); ++b) {
      const auto band = restrict_to_band(filtered, cfg.range_bands[b], cfg.range_bands[b + 1]);
      cr.band_ap.push_back(bev_iou_ap(band, cfg.iou_threshold));
    }
    try {
      cr.ave = ave(filtered, cfg.tp_threshold, false);
    } catch (const Error&) {
    }
    try {
      cr.adve = ave(filtered, cfg.tp_threshold, true);
    } catch (const Error&) {
    }
    report.classes[cls] = std::move(cr);
    all_filtered.insert(all_filtered.end(), std::make_move_iterator(filtered.begin()),
                        std::make_move_iterator(filtered.end()));
  }
  const bool dynamic_only = cfg.mode == EvalMode::kDenseRadar;
  for (const auto& [variable, edges] : cfg.slice_edges) {
    report.slices.push_back(
        sliced_eval(all_filtered, variable, edges, cfg.tp_threshold, dynamic_only));
  }
  return report;
}

std::string report_to_json(const EvalReport& report, int indent) {
  nlohmann::json j;
  j["mode"] = report.mode == EvalMode::kNuScenes ? "nuscenes" : "denseradar";
  for (const auto& [cls, cr] : report.classes) {
    nlohmann::json c;
    nlohmann::json ap_at = nlohmann::json::object();
    for (const auto& [t, ap] : cr.ap_at) {
      std::ostringstream key;
      key << t;
      ap_at[key.str()] = ap;
    }
    c["ap_at"] = ap_at;
    c["ap"] = cr.ap;
    c["iou_ap"] = cr.iou_ap;
    c["band_ap"] = cr.band_ap;
    c["ave"] = optional_json(cr.ave);
    c["adve"] = optional_json(cr.adve);
    c["n_labels"] = cr.n_labels;
    c["n_dets"] = cr.n_dets;
    j["classes"][std::string(to_string(cls))] = c;
  }
  j["slices"] = nlohmann::json::array();
  for (const SliceTable& t : report.slices) {
    nlohmann::json s;
    s["variable"] = std::string(to_string(t.variable));
    s["dynamic_only"] = t.dynamic_only;
    s["bins"] = nlohmann::json::array();
    for (const SliceBin& b : t.bins) {
      s["bins"].push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}, {"ave", optional_json(b.ave)}});
    }
    j["slices"].push_back(s);
  }
  return j.dump(indent);
}

}  // namespace lrfusion
