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

#include "sparseplan/anchor_init.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace sparseplan {
namespace {

double SquaredDistance(const PointND& a, const PointND& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

size_t NearestCentroid(const PointND& p, const std::vector<PointND>& centroids,
                       double* distance) {
  size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < centroids.size(); ++c) {
    const double d = SquaredDistance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (distance) *distance = best_d;
  return best;
}

size_t CountDistinct(std::span<const PointND> points) {
  std::vector<PointND> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  return static_cast<size_t>(
      std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

// k-means++: first centroid uniform, the rest drawn proportionally to the
// squared distance to the nearest chosen centroid.
std::vector<PointND> SeedCentroids(std::span<const PointND> points, size_t k,
                                   std::mt19937_64& rng) {
  std::vector<PointND> centroids;
  centroids.reserve(k);
  std::uniform_int_distribution<size_t> first(0, points.size() - 1);
  centroids.push_back(points[first(rng)]);
  std::vector<double> d2(points.size());
  while (centroids.size() < k) {
    for (size_t i = 0; i < points.size(); ++i) {
      NearestCentroid(points[i], centroids, &d2[i]);
    }
    std::discrete_distribution<size_t> pick(d2.begin(), d2.end());
    centroids.push_back(points[pick(rng)]);
  }
  return centroids;
}

double Objective(std::span<const PointND> points,
                 const std::vector<PointND>& centroids,
                 const std::vector<size_t>& assignment) {
  double sum = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    sum += SquaredDistance(points[i], centroids[assignment[i]]);
  }
  return sum;
}

}  // namespace

KMeansResult KMeans(std::span<const PointND> points, size_t k, uint64_t seed,
                    int max_iters) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  if (points.empty()) throw std::invalid_argument("k too large");
  const size_t dim = points.front().size();
  for (const PointND& p : points) {
    if (p.size() != dim) throw std::invalid_argument("mixed dimensions");
  }
  if (k > CountDistinct(points)) throw std::invalid_argument("k too large");

  std::mt19937_64 rng(seed);
  KMeansResult r;
  r.centroids = SeedCentroids(points, k, rng);
  r.assignment.assign(points.size(), 0);
  for (size_t i = 0; i < points.size(); ++i) {
    r.assignment[i] = NearestCentroid(points[i], r.centroids, nullptr);
  }
  r.objective_history.push_back(Objective(points, r.centroids, r.assignment));

  for (int iter = 0; iter < max_iters; ++iter) {
    // Update step.
    std::vector<PointND> sums(k, PointND(dim, 0.0));
    std::vector<size_t> counts(k, 0);
    for (size_t i = 0; i < points.size(); ++i) {
      const size_t c = r.assignment[i];
      ++counts[c];
      for (size_t j = 0; j < dim; ++j) sums[c][j] += points[i][j];
    }
    for (size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (size_t j = 0; j < dim; ++j) {
        r.centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
      }
    }
    r.iterations = iter + 1;
    r.objective_history.push_back(
        Objective(points, r.centroids, r.assignment));

    // Assignment step.
    bool changed = false;
    for (size_t i = 0; i < points.size(); ++i) {
      const size_t c = NearestCentroid(points[i], r.centroids, nullptr);
      if (c != r.assignment[i]) {
        r.assignment[i] = c;
        changed = true;
      }
    }
    if (!changed) {
      r.converged = true;
      break;
    }
  }
  r.objective = Objective(points, r.centroids, r.assignment);
  return r;
}

std::vector<AnchorBox> ClusterAnchorBoxes(std::span<const Vec3> centers,
                                          size_t num_anchors, uint64_t seed,
                                          KMeansResult* result) {
  if (centers.empty()) throw std::invalid_argument("no box centers");
  std::vector<PointND> points;
  points.reserve(centers.size());
  for (const Vec3& c : centers) points.push_back({c.x, c.y, c.z});
  KMeansResult km = KMeans(points, num_anchors, seed);
  std::vector<AnchorBox> anchors;
  anchors.reserve(km.centroids.size());
  for (const PointND& c : km.centroids) {
    anchors.push_back(DefaultAnchorAt({c[0], c[1], c[2]}));
  }
  if (result) *result = std::move(km);
  return anchors;
}

std::vector<MapPolyline> ClusterPolylines(std::span<const MapPolyline> polylines,
                                          size_t num_anchors, uint64_t seed,
                                          KMeansResult* result) {
  if (polylines.empty()) throw std::invalid_argument("no polylines");
  const size_t n = polylines.front().size();
  std::vector<PointND> points;
  points.reserve(polylines.size());
  for (const MapPolyline& line : polylines) {
    if (line.size() != n) throw std::invalid_argument("ragged polylines");
    PointND flat;
    flat.reserve(2 * n);
    for (const Vec2& p : line.points()) {
      flat.push_back(p.x);
      flat.push_back(p.y);
    }
    points.push_back(std::move(flat));
  }
  KMeansResult km = KMeans(points, num_anchors, seed);
  std::vector<MapPolyline> out;
  out.reserve(km.centroids.size());
  for (const PointND& c : km.centroids) {
    std::vector<Vec2> pts(n);
    for (size_t i = 0; i < n; ++i) pts[i] = {c[2 * i], c[2 * i + 1]};
    out.emplace_back(std::move(pts));
  }
  if (result) *result = std::move(km);
  return out;
}

std::vector<double> SinusoidalPe(Vec2 point, size_t dim, double temperature) {
  if (dim == 0 || dim % 4 != 0) throw std::invalid_argument("bad dimension");
  const size_t pairs = dim / 4;
  std::vector<double> out;
  out.reserve(dim);
  for (double coord : {point.x, point.y}) {
    for (size_t i = 0; i < pairs; ++i) {
      const double exponent =
          static_cast<double>(2 * i) / static_cast<double>(dim / 2);
      const double phase = coord / std::pow(temperature, exponent);
      out.push_back(std::sin(phase));
      out.push_back(std::cos(phase));
    }
  }
  return out;
}

std::vector<ModeQuery> BuildModeQueries(std::span<const Vec2> endpoints,
                                        size_t num_modes, size_t dim,
                                        uint64_t seed, double temperature) {
  std::vector<PointND> points;
  points.reserve(endpoints.size());
  for (const Vec2& e : endpoints) points.push_back({e.x, e.y});
  const KMeansResult km = KMeans(points, num_modes, seed);
  std::vector<ModeQuery> queries;
  queries.reserve(num_modes);
  for (const PointND& c : km.centroids) {
    const Vec2 p{c[0], c[1]};
    queries.push_back({p, SinusoidalPe(p, dim, temperature)});
  }
  return queries;
}

nlohmann::json AnchorSetToJson(const AnchorSet& anchors) {
  nlohmann::json boxes = nlohmann::json::array();
  for (const AnchorBox& b : anchors.boxes) boxes.push_back(b.ToArray());
  nlohmann::json polylines = nlohmann::json::array();
  for (const MapPolyline& line : anchors.polylines) {
    nlohmann::json pts = nlohmann::json::array();
    for (const Vec2& p : line.points()) pts.push_back({p.x, p.y});
    polylines.push_back(std::move(pts));
  }
  return {{"boxes", std::move(boxes)}, {"polylines", std::move(polylines)}};
}

AnchorSet AnchorSetFromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("boxes") || !j.contains("polylines")) {
    throw std::invalid_argument("anchors: expected boxes and polylines");
  }
  AnchorSet out;
  try {
    for (const auto& b : j.at("boxes")) {
      const auto values = b.get<std::vector<double>>();
      out.boxes.push_back(AnchorBox::FromArray(values));
    }
    for (const auto& line : j.at("polylines")) {
      std::vector<Vec2> pts;
      for (const auto& p : line) {
        const auto xy = p.get<std::vector<double>>();
        if (xy.size() != 2) {
          throw std::invalid_argument("anchors: polyline point needs x, y");
        }
        pts.push_back({xy[0], xy[1]});
      }
      out.polylines.emplace_back(std::move(pts));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("anchors: ") + e.what());
  }
  return out;
}

}  // namespace sparseplan
