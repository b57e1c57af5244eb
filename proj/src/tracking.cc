/* Copyright 2026 The sparseplan Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "sparseplan/tracking.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace sparseplan {

void TrackerState::AssignIds(std::span<Instance> instances, int64_t frame,
                             double threshold) {
  for (Instance& inst : instances) {
    if (!inst.has_track_id() && inst.confidence() > threshold) {
      inst.AssignTrackId(next_id_++);
    }
    if (inst.has_track_id()) {
      const TrackId id = *inst.track_id();
      if (id >= next_id_) next_id_ = id + 1;
      active_.insert_or_assign(id, ActiveTrack{inst, frame});
    }
  }
}

std::vector<Instance> PropagateInstances(std::span<const Instance> instances,
                                         const Pose2& prev_in_current,
                                         double dt) {
  if (dt < 0.0) throw std::invalid_argument("negative dt");
  std::vector<Instance> out;
  out.reserve(instances.size());
  for (const Instance& inst : instances) {
    Instance next = inst;
    AnchorBox& a = next.mutable_anchor();
    const Vec2 advanced{a.x + a.vx * dt, a.y + a.vy * dt};
    const Vec2 p = prev_in_current.TransformPoint(advanced);
    const Vec2 v = prev_in_current.RotateVector({a.vx, a.vy});
    const double c = std::cos(prev_in_current.yaw());
    const double s = std::sin(prev_in_current.yaw());
    const double sin_yaw = s * a.cos_yaw + c * a.sin_yaw;
    const double cos_yaw = c * a.cos_yaw - s * a.sin_yaw;
    a.x = p.x;
    a.y = p.y;
    a.z += a.vz * dt;
    a.sin_yaw = sin_yaw;
    a.cos_yaw = cos_yaw;
    a.vx = v.x;
    a.vy = v.y;
    out.push_back(std::move(next));
  }
  return out;
}

std::vector<std::optional<size_t>> GreedyCenterMatch(
    std::span<const Vec2> pred_centers, std::span<const double> confidences,
    std::span<const Vec2> gt_centers, double match_distance,
    double min_confidence) {
  if (pred_centers.size() != confidences.size()) {
    throw std::invalid_argument("centers and confidences differ in count");
  }
  std::vector<size_t> order;
  for (size_t i = 0; i < pred_centers.size(); ++i) {
    if (confidences[i] >= min_confidence) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return confidences[a] > confidences[b];
  });

  std::vector<std::optional<size_t>> match(pred_centers.size());
  std::vector<bool> gt_taken(gt_centers.size(), false);
  for (size_t pi : order) {
    std::optional<size_t> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t g = 0; g < gt_centers.size(); ++g) {
      if (gt_taken[g]) continue;
      const double d = Distance(pred_centers[pi], gt_centers[g]);
      if (d <= match_distance && d < best_d) {
        best_d = d;
        best = g;
      }
    }
    if (best) {
      gt_taken[*best] = true;
      match[pi] = best;
    }
  }
  return match;
}

TrackingCounts AccumulateTracking(const TrackingEvalInput& input,
                                  double match_distance,
                                  double min_confidence) {
  TrackingCounts counts;
  std::unordered_map<int64_t, TrackId> last_match;
  for (const TrackingFrame& frame : input) {
    std::vector<Vec2> pred_centers, gt_centers;
    std::vector<double> confidences;
    for (const TrackedObject& p : frame.predictions) {
      pred_centers.push_back(p.center);
      confidences.push_back(p.confidence);
    }
    for (const GtObject& g : frame.gt) gt_centers.push_back(g.center);
    const auto match = GreedyCenterMatch(pred_centers, confidences, gt_centers,
                                         match_distance, min_confidence);

    int64_t matched_here = 0;
    for (size_t pi = 0; pi < match.size(); ++pi) {
      const TrackedObject& pred = frame.predictions[pi];
      if (pred.confidence < min_confidence) continue;
      if (!match[pi]) {
        ++counts.fp;
        continue;
      }
      const GtObject& gt = frame.gt[*match[pi]];
      ++matched_here;
      ++counts.tp;
      counts.distance_sum += Distance(pred.center, gt.center);
      counts.tp_confidences.push_back(pred.confidence);
      auto [it, inserted] = last_match.try_emplace(gt.id, pred.track_id);
      if (!inserted && it->second != pred.track_id) {
        ++counts.id_switches;
        it->second = pred.track_id;
      }
    }
    counts.fn += static_cast<int64_t>(frame.gt.size()) - matched_here;
  }
  return counts;
}

TrackingMetrics ComputeTrackingMetrics(const TrackingEvalInput& input,
                                       double match_distance) {
  int64_t num_gt = 0;
  for (const TrackingFrame& f : input) {
    num_gt += static_cast<int64_t>(f.gt.size());
  }
  if (num_gt == 0) throw std::invalid_argument("empty ground truth");

  TrackingMetrics m;
  m.num_gt = num_gt;
  m.match_distance = match_distance;

  const double lowest = -std::numeric_limits<double>::infinity();
  TrackingCounts all = AccumulateTracking(input, match_distance, lowest);
  m.recall = static_cast<double>(all.tp) / static_cast<double>(num_gt);
  m.id_switches = all.id_switches;

  std::vector<double> scores = all.tp_confidences;
  std::sort(scores.begin(), scores.end(), std::greater<>());

  double motar_sum = 0.0;
  double motp_sum = 0.0;
  for (int i = 0; i < kNumRecallThresholds; ++i) {
    const double target =
        kMinRecall + (1.0 - kMinRecall) * i / (kNumRecallThresholds - 1);
    // Rounded so that e.g. 0.1 * 10 lands on 1 rather than 1 + ulp.
    const double needed =
        std::ceil(std::round(target * num_gt * 1e9) / 1e9);
    const auto rank = static_cast<size_t>(std::max(needed, 1.0));
    if (rank > scores.size()) {
      motp_sum += match_distance;
      continue;
    }
    const TrackingCounts c =
        AccumulateTracking(input, match_distance, scores[rank - 1]);
    if (c.tp == 0) {
      motp_sum += match_distance;
      continue;
    }
    const double tp = static_cast<double>(c.tp);
    motar_sum += std::max(
        0.0, 1.0 - static_cast<double>(c.id_switches + c.fp) / tp);
    motp_sum += c.distance_sum / tp;
  }
  m.amota = motar_sum / kNumRecallThresholds;
  m.amotp = motp_sum / kNumRecallThresholds;
  return m;
}

}  // namespace sparseplan
