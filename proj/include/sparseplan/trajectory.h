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

#ifndef SPARSEPLAN_TRAJECTORY_H_
#define SPARSEPLAN_TRAJECTORY_H_

#include <vector>

#include "sparseplan/geometry.h"

namespace sparseplan {

// Future waypoints sampled at a fixed rate; index 0 is one step ahead of the
// current time.
using Trajectory = std::vector<Vec2>;

// K candidate trajectories with one score each. Used for both motion
// forecasts and planning proposals.
struct TrajectorySet {
  std::vector<Trajectory> modes;
  std::vector<double> scores;

  size_t num_modes() const { return modes.size(); }
};

// Indices of the `k` highest-scored modes, best first; ties keep the lower
// index first.
std::vector<size_t> TopKModes(const TrajectorySet& set, size_t k);

// Index of the highest score; ties resolve to the lowest index. Requires a
// non-empty range.
size_t ArgMax(const std::vector<double>& values);

}  // namespace sparseplan

#endif  // SPARSEPLAN_TRAJECTORY_H_
