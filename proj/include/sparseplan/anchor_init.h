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

// Data-driven initialization: K-Means over box centers, polylines and
// trajectory endpoints, and the sinusoidal encoding that turns intention
// points into mode queries.

#ifndef SPARSEPLAN_ANCHOR_INIT_H_
#define SPARSEPLAN_ANCHOR_INIT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "sparseplan/geometry.h"
#include "sparseplan/instances.h"

namespace sparseplan {

using PointND = std::vector<double>;

struct KMeansResult {
  std::vector<PointND> centroids;
  // assignment[i] is the centroid nearest to input i (lowest index on ties).
  std::vector<size_t> assignment;
  // Sum of squared distances of every input to its assigned centroid.
  double objective = 0.0;
  // Objective after the initial assignment and after every Lloyd update.
  std::vector<double> objective_history;
  int iterations = 0;
  bool converged = false;
};

// Lloyd's algorithm from k-means++ seeding. Runs until the assignment stops
// changing or `max_iters` updates have been made. A cluster that loses all
// its points keeps its previous centroid.
//
// Throws std::invalid_argument("k too large") when k exceeds the number of
// distinct points, and on k == 0 or mixed dimensions.
KMeansResult KMeans(std::span<const PointND> points, size_t k, uint64_t seed,
                    int max_iters = 100);

// Paper-scale presets; desk runs pass their own counts.
inline constexpr size_t kNumAnchorBoxes = 900;
inline constexpr size_t kNumAnchorPolylines = 100;
inline constexpr size_t kNumModes = 6;

// Anchor locations are the K-Means centroids of the given box centers; the
// remaining components take DefaultAnchorParams().
std::vector<AnchorBox> ClusterAnchorBoxes(std::span<const Vec3> centers,
                                          size_t num_anchors, uint64_t seed,
                                          KMeansResult* result = nullptr);

// Clusters polylines as flattened 2 * N_p vectors. Throws
// std::invalid_argument("ragged polylines") when point counts differ.
std::vector<MapPolyline> ClusterPolylines(std::span<const MapPolyline> polylines,
                                          size_t num_anchors, uint64_t seed,
                                          KMeansResult* result = nullptr);

inline constexpr double kDefaultPeTemperature = 10000.0;

// Encodes a BEV point into `dim` features: the first dim/2 encode x, the
// rest encode y. Each half holds dim/4 (sin, cos) pairs with frequency
// temperature^(-4i/dim) for pair i. Throws std::invalid_argument("bad
// dimension") unless dim is a positive multiple of 4.
std::vector<double> SinusoidalPe(Vec2 point, size_t dim,
                                 double temperature = kDefaultPeTemperature);

struct ModeQuery {
  Vec2 intention_point;
  std::vector<double> encoding;
};

// Clusters endpoints into `num_modes` intention points and encodes each one.
std::vector<ModeQuery> BuildModeQueries(
    std::span<const Vec2> endpoints, size_t num_modes, size_t dim,
    uint64_t seed, double temperature = kDefaultPeTemperature);

// On-disk anchors: {"boxes": [[11 floats], ...], "polylines": [[[x, y], ...],
// ...]}.
struct AnchorSet {
  std::vector<AnchorBox> boxes;
  std::vector<MapPolyline> polylines;
};

nlohmann::json AnchorSetToJson(const AnchorSet& anchors);
// Throws std::invalid_argument on schema violations.
AnchorSet AnchorSetFromJson(const nlohmann::json& j);

}  // namespace sparseplan

#endif  // SPARSEPLAN_ANCHOR_INIT_H_
