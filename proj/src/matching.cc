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

#include "sparseplan/matching.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparseplan {

CostMatrix::CostMatrix(size_t rows, size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (!std::isfinite(fill)) throw std::invalid_argument("non-finite cost");
}

CostMatrix CostMatrix::FromRows(const std::vector<std::vector<double>>& rows) {
  const size_t cols = rows.empty() ? 0 : rows.front().size();
  CostMatrix m(rows.size(), cols);
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw std::invalid_argument("ragged matrix");
    for (size_t c = 0; c < cols; ++c) m.Set(r, c, rows[r][c]);
  }
  return m;
}

void CostMatrix::Set(size_t r, size_t c, double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite cost");
  data_[r * cols_ + c] = value;
}

namespace {

// Shortest augmenting path assignment for n <= m. `at(i, j)` is 0-based.
// Returns the column of each row.
template <typename CostFn>
std::vector<size_t> SolveRowsToCols(size_t n, size_t m, CostFn at) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based with a virtual column 0, as in the classic formulation.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<size_t> p(m + 1, 0), way(m + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    p[0] = i;
    size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const size_t i0 = p[j0];
      double delta = kInf;
      size_t j1 = 0;
      for (size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<size_t> row_to_col(n, 0);
  for (size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment Hungarian(const CostMatrix& cost) {
  Assignment out;
  out.row_to_col.assign(cost.rows(), std::nullopt);
  if (cost.empty()) return out;

  if (cost.rows() <= cost.cols()) {
    const auto cols = SolveRowsToCols(
        cost.rows(), cost.cols(),
        [&](size_t r, size_t c) { return cost(r, c); });
    for (size_t r = 0; r < cols.size(); ++r) out.row_to_col[r] = cols[r];
  } else {
    // Solve the transpose so that every column is matched.
    const auto rows = SolveRowsToCols(
        cost.cols(), cost.rows(),
        [&](size_t c, size_t r) { return cost(r, c); });
    for (size_t c = 0; c < rows.size(); ++c) out.row_to_col[rows[c]] = c;
  }
  for (size_t r = 0; r < out.row_to_col.size(); ++r) {
    if (out.row_to_col[r]) out.total_cost += cost(r, *out.row_to_col[r]);
  }
  return out;
}

double FocalLoss(double p, bool is_positive, double alpha, double gamma) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("invalid probability");
  if (is_positive) return -alpha * std::pow(1.0 - p, gamma) * std::log(p);
  return -(1.0 - alpha) * std::pow(p, gamma) * std::log1p(-p);
}

std::optional<double> AverageDisplacement(std::span<const Vec2> mode,
                                          std::span<const Vec2> gt,
                                          std::span<const bool> valid) {
  if (!valid.empty() && valid.size() != gt.size()) {
    throw std::invalid_argument("mask length differs from ground truth");
  }
  if (mode.size() < gt.size()) {
    throw std::invalid_argument("mode shorter than ground truth");
  }
  double sum = 0.0;
  size_t n = 0;
  for (size_t t = 0; t < gt.size(); ++t) {
    if (!valid.empty() && !valid[t]) continue;
    sum += Distance(mode[t], gt[t]);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

size_t WtaSelect(const TrajectorySet& modes, std::span<const Vec2> gt,
                 std::span<const bool> valid) {
  if (modes.modes.empty()) throw std::invalid_argument("no modes");
  size_t best = 0;
  double best_ade = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < modes.modes.size(); ++k) {
    const auto ade = AverageDisplacement(modes.modes[k], gt, valid);
    if (!ade) throw std::invalid_argument("no supervision");
    if (*ade < best_ade) {
      best_ade = *ade;
      best = k;
    }
  }
  return best;
}

LossBreakdown TotalLoss(const LossComponents& c, const LossWeights& w) {
  for (double v : {c.det_cls, c.det_reg, c.map_cls, c.map_reg, c.depth,
                   c.motion_cls, c.motion_reg, c.plan_cls, c.plan_reg,
                   c.plan_status}) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite loss term");
  }
  LossBreakdown b;
  b.det = w.det_cls * c.det_cls + w.det_reg * c.det_reg;
  b.map = w.map_cls * c.map_cls + w.map_reg * c.map_reg;
  b.motion = w.motion_cls * c.motion_cls + w.motion_reg * c.motion_reg;
  b.plan = w.plan_cls * c.plan_cls + w.plan_reg * c.plan_reg +
           w.plan_status * c.plan_status;
  b.depth = w.depth * c.depth;
  b.total = b.det + b.map + b.motion + b.plan + b.depth;
  return b;
}

double L1Loss(std::span<const double> predicted,
              std::span<const double> target) {
  if (predicted.size() != target.size()) {
    throw std::invalid_argument("size mismatch");
  }
  if (predicted.empty()) return 0.0;
  double sum = 0.0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    sum += std::abs(predicted[i] - target[i]);
  }
  return sum / static_cast<double>(predicted.size());
}

CostMatrix DetectionCostMatrix(std::span<const Instance> predictions,
                               std::span<const AnchorBox> ground_truth,
                               const LossWeights& weights) {
  constexpr double kEps = 1e-6;
  // Regression terms: everything but z.
  constexpr size_t kRegTerms[] = {0, 1, 3, 4, 5, 6, 7, 8, 9, 10};
  CostMatrix cost(predictions.size(), ground_truth.size());
  for (size_t r = 0; r < predictions.size(); ++r) {
    const double p = std::clamp(predictions[r].confidence(), kEps, 1.0 - kEps);
    const double cls = FocalLoss(p, /*is_positive=*/true);
    const auto pred = predictions[r].anchor().ToArray();
    for (size_t c = 0; c < ground_truth.size(); ++c) {
      const auto gt = ground_truth[c].ToArray();
      double reg = 0.0;
      for (size_t i : kRegTerms) reg += std::abs(pred[i] - gt[i]);
      reg /= static_cast<double>(std::size(kRegTerms));
      cost.Set(r, c, weights.det_cls * cls + weights.det_reg * reg);
    }
  }
  return cost;
}

}  // namespace sparseplan
