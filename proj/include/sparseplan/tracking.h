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

// Threshold-based identity assignment, temporal propagation of instances and
// multi-object tracking metrics.

#ifndef SPARSEPLAN_TRACKING_H_
#define SPARSEPLAN_TRACKING_H_

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sparseplan/geometry.h"
#include "sparseplan/instances.h"

namespace sparseplan {

inline constexpr double kDefaultTrackThreshold = 0.2;

class TrackerState {
 public:
  struct ActiveTrack {
    Instance instance;
    int64_t frame;
  };

  TrackId next_id() const { return next_id_; }
  const std::map<TrackId, ActiveTrack>& active() const { return active_; }

  // Instances that already carry an ID keep it. An ID-less instance whose
  // confidence is strictly greater than `threshold` is bound to a fresh ID;
  // the rest stay ID-less. Every identified instance refreshes its entry in
  // active(). Low-confidence tracks are retained, never pruned.
  void AssignIds(std::span<Instance> instances, int64_t frame,
                 double threshold = kDefaultTrackThreshold);

 private:
  TrackId next_id_ = 0;
  std::map<TrackId, ActiveTrack> active_;
};

// Advances each anchor at constant velocity for `dt` seconds in the previous
// ego frame, then re-expresses position, yaw and velocity in the current ego
// frame. `prev_in_current` is the previous ego pose seen from the current
// one. IDs, confidences and embeddings carry over unchanged.
std::vector<Instance> PropagateInstances(std::span<const Instance> instances,
                                         const Pose2& prev_in_current,
                                         double dt);

struct GtObject {
  int64_t id;
  Vec2 center;
};

struct TrackedObject {
  TrackId track_id;
  Vec2 center;
  double confidence;
};

struct TrackingFrame {
  std::vector<GtObject> gt;
  std::vector<TrackedObject> predictions;
};

using TrackingEvalInput = std::vector<TrackingFrame>;

inline constexpr double kDefaultMatchDistance = 2.0;
inline constexpr int kNumRecallThresholds = 40;
inline constexpr double kMinRecall = 0.1;

struct TrackingMetrics {
  double amota = 0.0;
  double amotp = 0.0;
  // Over the unfiltered prediction set.
  double recall = 0.0;
  int64_t id_switches = 0;
  int64_t num_gt = 0;
  double match_distance = kDefaultMatchDistance;
};

// Greedy center-distance matching: predictions in descending confidence
// (ties by index) each claim the nearest unclaimed GT center within
// `match_distance` (ties by GT index). Returns the GT index per prediction.
// Predictions below `min_confidence` stay unmatched.
std::vector<std::optional<size_t>> GreedyCenterMatch(
    std::span<const Vec2> pred_centers, std::span<const double> confidences,
    std::span<const Vec2> gt_centers, double match_distance,
    double min_confidence = -std::numeric_limits<double>::infinity());

// Per-frame counts under one confidence cut.
struct TrackingCounts {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  int64_t id_switches = 0;
  double distance_sum = 0.0;
  // Confidences of the matched predictions.
  std::vector<double> tp_confidences;
};

// Matches predictions with confidence >= `min_confidence` to GT frame by
// frame with GreedyCenterMatch. An ID switch is counted whenever a GT identity is matched
// to a track ID that differs from the one it was last matched to.
TrackingCounts AccumulateTracking(const TrackingEvalInput& input,
                                  double match_distance,
                                  double min_confidence);

// AMOTA / AMOTP over kNumRecallThresholds recall targets evenly spaced in
// [kMinRecall, 1]. For target r the confidence cut is the confidence of the
// ceil(r * num_gt)-th best matched prediction of the unfiltered run; the
// filtered run gives
//   MOTAR = max(0, 1 - (IDS + FP + FN - (1 - recall) * P) / (recall * P))
// which, with recall = TP / P, reduces to max(0, 1 - (IDS + FP) / TP), and
// MOTP = mean matched distance. Unreachable targets score MOTAR 0 and MOTP
// `match_distance`. Throws std::invalid_argument("empty ground truth").
TrackingMetrics ComputeTrackingMetrics(
    const TrackingEvalInput& input,
    double match_distance = kDefaultMatchDistance);

}  // namespace sparseplan

#endif  // SPARSEPLAN_TRACKING_H_
