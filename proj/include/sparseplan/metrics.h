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

// Open-loop planning metrics (L2, box-overlap collision rate and the legacy
// occupancy-grid collision rate) and multi-modal forecasting metrics
// (minADE, minFDE, miss rate, EPA).

#ifndef SPARSEPLAN_METRICS_H_
#define SPARSEPLAN_METRICS_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sparseplan/geometry.h"
#include "sparseplan/planner.h"
#include "sparseplan/trajectory.h"

namespace sparseplan {

// Planning horizons 1 s, 2 s and 3 s at 2 Hz, as waypoint indices.
inline constexpr std::array<size_t, 3> kHorizonSteps = {1, 3, 5};
inline constexpr std::array<const char*, 3> kHorizonNames = {"1s", "2s",
                                                             "3s"};

struct HorizonTable {
  std::array<double, 3> at{};
  double avg = 0.0;
};

struct PlanningEvalSample {
  Trajectory plan;
  Trajectory gt;
  // Ego heading at the current time.
  double gt_yaw0 = 0.0;
  VehicleDims ego;
  // agents[t]: obstacle boxes at waypoint t.
  std::vector<std::vector<OBB2>> agents;
};

enum class L2Mode {
  // Displacement at the horizon waypoint only.
  kAtHorizon,
  // Mean displacement over all waypoints up to the horizon.
  kCumulativeMean,
};

// Throws std::invalid_argument("empty samples") or ("horizon mismatch").
HorizonTable PlanningL2(std::span<const PlanningEvalSample> samples,
                        L2Mode mode = L2Mode::kAtHorizon);

// Per-horizon verdicts for one sample: the ego box at the planned waypoint,
// heading from EstimateYaws(plan, gt_yaw0), overlaps an obstacle box.
std::array<bool, 3> ObbCollisions(const PlanningEvalSample& sample);

inline constexpr double kDefaultGridResolution = 0.5;

// Legacy occupancy-grid verdicts. Cells are [i r, (i + 1) r) squares on a
// grid anchored at the ego origin. A box covers a cell when the cell center
// lies inside the box grown by r / 2 on every side; this holds for obstacle
// boxes and for the ego footprint, which is placed at the planned waypoint
// with its heading frozen at gt_yaw0. The verdict is true when a covered
// ego cell is also covered by an obstacle.
std::array<bool, 3> GridCollisions(const PlanningEvalSample& sample,
                                   double resolution = kDefaultGridResolution);

HorizonTable CollisionRateObb(std::span<const PlanningEvalSample> samples);
// Throws std::invalid_argument unless resolution > 0.
HorizonTable CollisionRateGrid(std::span<const PlanningEvalSample> samples,
                               double resolution = kDefaultGridResolution);

// A straight 2 m/s plan passing a 0.3 m square obstacle with 0.4 m lateral
// clearance. Box overlap reports no collision; the 0.5 m grid reports one at
// 2 s and 3 s.
PlanningEvalSample SubCellObstacleScene();
// A left quarter-turn ending next to an obstacle that clears the turned ego
// box but sits inside the footprint with the initial heading. Verdicts
// differ at 3 s.
PlanningEvalSample HeadingChangeScene();

struct MotionEvalSample {
  // Whether a prediction was matched to this GT agent. Unmatched agents
  // only count towards the EPA denominator.
  bool matched = false;
  TrajectorySet prediction;
  Trajectory gt;
  // Same length as gt; empty means every step is valid.
  std::vector<bool> valid;
};

struct MotionEvalInput {
  std::vector<MotionEvalSample> agents;
  // Predictions that were not matched to any GT agent.
  int64_t false_positives = 0;
};

struct MotionParams {
  double miss_threshold = 2.0;
  double epa_alpha = 0.5;
  double epa_threshold = 2.0;
};

struct MotionMetrics {
  // Means over matched agents with at least one valid step; NaN when there
  // are none.
  double min_ade = 0.0;
  double min_fde = 0.0;
  double miss_rate = 0.0;
  // (hits - alpha * FP) / num_gt, clamped at 0. A hit is a matched agent
  // whose minFDE <= epa_threshold.
  double epa = 0.0;
  int64_t num_gt = 0;
  int64_t num_evaluated = 0;
  int64_t hits = 0;
  int64_t false_positives = 0;
};

// minFDE is taken at the last valid step. Throws std::invalid_argument
// ("empty samples") when there are no agents.
MotionMetrics ComputeMotionMetrics(const MotionEvalInput& input,
                                   const MotionParams& params = {});

}  // namespace sparseplan

#endif  // SPARSEPLAN_METRICS_H_
