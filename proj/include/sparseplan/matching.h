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

// Assignment and loss evaluation used to supervise the sparse heads. These are
// value computations only; nothing here differentiates or trains.

#ifndef SPARSEPLAN_MATCHING_H_
#define SPARSEPLAN_MATCHING_H_

#include <optional>
#include <span>
#include <vector>

#include "sparseplan/instances.h"
#include "sparseplan/trajectory.h"

namespace sparseplan {

// Dense row-major cost matrix; rows are predictions, columns ground truths.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(size_t rows, size_t cols, double fill = 0.0);
  // Throws std::invalid_argument on ragged rows or non-finite entries.
  static CostMatrix FromRows(const std::vector<std::vector<double>>& rows);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }
  // Throws std::invalid_argument on non-finite values.
  void Set(size_t r, size_t c, double value);

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

struct Assignment {
  // row_to_col[r] is the matched column, or nullopt for unmatched rows.
  std::vector<std::optional<size_t>> row_to_col;
  double total_cost = 0.0;
};

// Minimum-cost assignment matching min(rows, cols) pairs (shortest
// augmenting paths with potentials, O(n^2 m)). An empty matrix yields an
// empty assignment.
Assignment Hungarian(const CostMatrix& cost);

inline constexpr double kFocalAlpha = 0.25;
inline constexpr double kFocalGamma = 2.0;

// -alpha (1 - p)^gamma ln p for positives, -(1 - alpha) p^gamma ln(1 - p) for
// negatives. Throws std::invalid_argument("invalid probability") unless
// 0 < p < 1.
double FocalLoss(double p, bool is_positive, double alpha = kFocalAlpha,
                 double gamma = kFocalGamma);

// Mean displacement of `mode` against `gt` over the valid steps.
// `valid` may be empty (all steps valid). Returns nullopt when no step is
// valid.
std::optional<double> AverageDisplacement(std::span<const Vec2> mode,
                                          std::span<const Vec2> gt,
                                          std::span<const bool> valid = {});

// Winner-takes-all: the mode with the lowest ADE against `gt`, lowest index
// on ties. Throws std::invalid_argument("no supervision") if no step is
// valid, or if a mode is shorter than `gt`.
size_t WtaSelect(const TrajectorySet& modes, std::span<const Vec2> gt,
                 std::span<const bool> valid = {});

struct LossWeights {
  double det_cls = 2.0;
  double det_reg = 0.25;
  double map_cls = 1.0;
  double map_reg = 10.0;
  double depth = 0.2;
  double motion_cls = 0.2;
  double motion_reg = 0.2;
  double plan_cls = 0.5;
  double plan_reg = 1.0;
  double plan_status = 1.0;
};

// Unweighted per-term losses.
struct LossComponents {
  double det_cls = 0.0;
  double det_reg = 0.0;
  double map_cls = 0.0;
  double map_reg = 0.0;
  double depth = 0.0;
  double motion_cls = 0.0;
  double motion_reg = 0.0;
  double plan_cls = 0.0;
  double plan_reg = 0.0;
  double plan_status = 0.0;
};

struct LossBreakdown {
  double det = 0.0;
  double map = 0.0;
  double motion = 0.0;
  double plan = 0.0;
  double depth = 0.0;
  double total = 0.0;
};

// L = L_det + L_map + L_motion + L_plan + L_depth with every term weighted.
// Throws std::invalid_argument on non-finite components.
LossBreakdown TotalLoss(const LossComponents& components,
                        const LossWeights& weights = {});

// Mean absolute error between paired scalars, e.g. predicted and
// reference depths.
double L1Loss(std::span<const double> predicted,
              std::span<const double> target);

// Matching cost between predicted instances and GT boxes:
//   det_cls * focal(confidence, positive)
//   + det_reg * mean |pred - gt| over the anchor terms except z.
CostMatrix DetectionCostMatrix(std::span<const Instance> predictions,
                               std::span<const AnchorBox> ground_truth,
                               const LossWeights& weights = {});

}  // namespace sparseplan

#endif  // SPARSEPLAN_MATCHING_H_
