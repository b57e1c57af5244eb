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
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "oracles.h"

namespace sparseplan {
namespace {

std::vector<std::vector<double>> RandomCost(std::mt19937_64& rng, size_t r,
                                            size_t c) {
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<std::vector<double>> m(r, std::vector<double>(c));
  for (auto& row : m) {
    for (double& v : row) v = u(rng);
  }
  return m;
}

void ExpectValidAssignment(const Assignment& a, size_t rows, size_t cols) {
  ASSERT_EQ(a.row_to_col.size(), rows);
  std::set<size_t> used;
  size_t matched = 0;
  for (const auto& c : a.row_to_col) {
    if (!c) continue;
    EXPECT_LT(*c, cols);
    EXPECT_TRUE(used.insert(*c).second);
    ++matched;
  }
  EXPECT_EQ(matched, std::min(rows, cols));
}

TEST(HungarianTest, OneByOne) {
  const Assignment a = Hungarian(CostMatrix::FromRows({{3.5}}));
  EXPECT_EQ(a.row_to_col[0], 0u);
  EXPECT_EQ(a.total_cost, 3.5);
}

TEST(HungarianTest, TwoByTwo) {
  // Permutations: identity costs 1 + 1 = 2, swap costs 2 + 2 = 4.
  const Assignment a = Hungarian(CostMatrix::FromRows({{1, 2}, {2, 1}}));
  EXPECT_EQ(a.row_to_col[0], 0u);
  EXPECT_EQ(a.row_to_col[1], 1u);
  EXPECT_EQ(a.total_cost, 2.0);
}

TEST(HungarianTest, ZeroDiagonal) {
  std::vector<std::vector<double>> m(4, std::vector<double>(4, 1.0));
  for (size_t i = 0; i < 4; ++i) m[i][i] = 0.0;
  const Assignment a = Hungarian(CostMatrix::FromRows(m));
  for (size_t i = 0; i < 4; ++i) EXPECT_EQ(a.row_to_col[i], i);
  EXPECT_EQ(a.total_cost, 0.0);
}

TEST(HungarianTest, EmptyAndRectangular) {
  EXPECT_TRUE(Hungarian(CostMatrix()).row_to_col.empty());
  const Assignment wide = Hungarian(CostMatrix::FromRows({{5, 1, 3}}));
  EXPECT_EQ(wide.row_to_col[0], 1u);
  const Assignment tall = Hungarian(CostMatrix::FromRows({{5}, {1}, {3}}));
  EXPECT_FALSE(tall.row_to_col[0]);
  EXPECT_EQ(tall.row_to_col[1], 0u);
  EXPECT_FALSE(tall.row_to_col[2]);
  EXPECT_EQ(tall.total_cost, 1.0);
}

TEST(HungarianTest, RejectsBadInput) {
  EXPECT_THROW(CostMatrix::FromRows({{1, 2}, {3}}), std::invalid_argument);
  CostMatrix m(2, 2);
  EXPECT_THROW(m.Set(0, 0, std::numeric_limits<double>::quiet_NaN()),
               std::invalid_argument);
}

TEST(HungarianTest, MatchesBruteForce) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<size_t> dim(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t r = dim(rng), c = dim(rng);
    const auto m = RandomCost(rng, r, c);
    const Assignment a = Hungarian(CostMatrix::FromRows(m));
    ExpectValidAssignment(a, r, c);
    EXPECT_NEAR(a.total_cost, oracle::BruteForceAssignmentCost(m), 1e-9);
  }
}

TEST(HungarianTest, RowAndColumnShiftInvariance) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    auto m = RandomCost(rng, 5, 5);
    const Assignment base = Hungarian(CostMatrix::FromRows(m));
    for (double& v : m[2]) v += 7.0;
    for (auto& row : m) row[4] += 3.0;
    const Assignment shifted = Hungarian(CostMatrix::FromRows(m));
    // Random continuous costs have a unique optimum.
    EXPECT_EQ(shifted.row_to_col, base.row_to_col);
    EXPECT_NEAR(shifted.total_cost, base.total_cost + 10.0, 1e-9);
  }
}

TEST(FocalLossTest, HandValue) {
  // 0.25 * (1 - 0.5)^2 * ln 2.
  EXPECT_NEAR(FocalLoss(0.5, true), 0.043322, 1e-6);
  EXPECT_NEAR(FocalLoss(0.5, true), 0.25 * 0.25 * std::numbers::ln2, 1e-15);
}

TEST(FocalLossTest, ReducesToCrossEntropy) {
  for (double p : {0.1, 0.3, 0.9}) {
    EXPECT_NEAR(FocalLoss(p, true, 1.0, 0.0), -std::log(p), 1e-15);
  }
}

TEST(FocalLossTest, ConfidentCorrectIsNearZero) {
  EXPECT_LT(FocalLoss(1.0 - 1e-9, true), 1e-12);
  EXPECT_LT(FocalLoss(1e-9, false), 1e-12);
}

TEST(FocalLossTest, StrictlyDecreasingForPositives) {
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 1000; ++i) {
    const double l = FocalLoss(i / 1000.0, true);
    EXPECT_LT(l, prev);
    prev = l;
  }
}

TEST(FocalLossTest, RejectsOutOfRange) {
  EXPECT_THROW(FocalLoss(0.0, true), std::invalid_argument);
  EXPECT_THROW(FocalLoss(1.0, false), std::invalid_argument);
  EXPECT_THROW(FocalLoss(std::nan(""), true), std::invalid_argument);
}

Trajectory Shifted(const Trajectory& t, double dy) {
  Trajectory out = t;
  for (Vec2& p : out) p.y += dy;
  return out;
}

Trajectory Gt() { return {{1, 0}, {2, 0}, {3, 0}, {4, 0}}; }

TEST(WtaTest, ExactModeWins) {
  const TrajectorySet set{{Shifted(Gt(), 1), Gt(), Shifted(Gt(), -2)},
                          {0.3, 0.3, 0.4}};
  EXPECT_EQ(WtaSelect(set, Gt()), 1u);
  EXPECT_EQ(AverageDisplacement(Gt(), Gt()), 0.0);
}

TEST(WtaTest, SmallerOffsetWins) {
  const TrajectorySet set{{Shifted(Gt(), 0.5), Shifted(Gt(), 1.0)}, {0.5, 0.5}};
  EXPECT_EQ(WtaSelect(set, Gt()), 0u);
  EXPECT_DOUBLE_EQ(*AverageDisplacement(set.modes[0], Gt()), 0.5);
}

TEST(WtaTest, PermutationAndRigidInvariance) {
  std::mt19937_64 rng(30);
  std::normal_distribution<double> n(0, 2);
  for (int trial = 0; trial < 100; ++trial) {
    TrajectorySet set;
    for (int m = 0; m < 6; ++m) {
      Trajectory t;
      for (int k = 0; k < 4; ++k) t.push_back({n(rng), n(rng)});
      set.modes.push_back(t);
      set.scores.push_back(1.0 / 6);
    }
    Trajectory gt;
    for (int k = 0; k < 4; ++k) gt.push_back({n(rng), n(rng)});
    const size_t w = WtaSelect(set, gt);

    TrajectorySet reversed = set;
    std::reverse(reversed.modes.begin(), reversed.modes.end());
    EXPECT_EQ(WtaSelect(reversed, gt), 5 - w);

    const Pose2 t(n(rng), n(rng), n(rng));
    TrajectorySet moved = set;
    for (auto& mode : moved.modes) {
      for (Vec2& p : mode) p = t.TransformPoint(p);
    }
    Trajectory moved_gt = gt;
    for (Vec2& p : moved_gt) p = t.TransformPoint(p);
    EXPECT_EQ(WtaSelect(moved, moved_gt), w);
  }
}

TEST(WtaTest, NoSupervisionThrows) {
  const TrajectorySet set{{Gt()}, {1.0}};
  const bool mask[4] = {false, false, false, false};
  EXPECT_THROW(WtaSelect(set, Gt(), mask), std::invalid_argument);
  EXPECT_FALSE(AverageDisplacement(Gt(), Gt(), mask).has_value());
}

TEST(WtaTest, MaskedStepsIgnored) {
  const bool mask[4] = {true, true, false, false};
  Trajectory off = Gt();
  off[3].y = 100;
  EXPECT_EQ(*AverageDisplacement(off, Gt(), mask), 0.0);
}

TEST(TotalLossTest, ZeroComponents) {
  EXPECT_EQ(TotalLoss({}).total, 0.0);
}

TEST(TotalLossTest, WeightsApplied) {
  LossComponents c;
  c.det_cls = 1.0;
  EXPECT_EQ(TotalLoss(c).total, 2.0);
  c = {};
  c.det_reg = 1.0;
  EXPECT_EQ(TotalLoss(c).total, 0.25);
  c = {};
  c.map_reg = 0.5;
  EXPECT_EQ(TotalLoss(c).total, 5.0);
  c = {};
  c.plan_reg = 1.0;
  EXPECT_EQ(TotalLoss(c).total, 1.0);
}

TEST(TotalLossTest, BreakdownSumsToTotal) {
  LossComponents c{1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  const LossBreakdown b = TotalLoss(c);
  EXPECT_DOUBLE_EQ(b.det, 2.25);
  EXPECT_DOUBLE_EQ(b.map, 11.0);
  EXPECT_DOUBLE_EQ(b.motion, 0.4);
  EXPECT_DOUBLE_EQ(b.plan, 2.5);
  EXPECT_DOUBLE_EQ(b.depth, 0.2);
  EXPECT_DOUBLE_EQ(b.total, b.det + b.map + b.motion + b.plan + b.depth);
  c.depth = std::numeric_limits<double>::infinity();
  EXPECT_THROW(TotalLoss(c), std::invalid_argument);
}

TEST(L1LossTest, Mean) {
  const std::vector<double> a = {1, 2, 3}, b = {1, 4, 0};
  EXPECT_DOUBLE_EQ(L1Loss(a, b), 5.0 / 3.0);
}

TEST(DetectionCostTest, PerfectMatchIsDiagonal) {
  std::vector<AnchorBox> gts;
  std::vector<Instance> preds;
  for (int i = 0; i < 4; ++i) {
    BoxState s;
    s.center = {10.0 * i, -5.0 * i, 0.5};
    s.dims = {1.8, 1.5, 4.5};
    s.yaw = 0.3 * i;
    gts.push_back(EncodeAnchor(s));
  }
  for (int i = 3; i >= 0; --i) preds.push_back(Instance(gts[i], 0.9));
  const CostMatrix m = DetectionCostMatrix(preds, gts);
  const Assignment a = Hungarian(m);
  for (size_t r = 0; r < 4; ++r) EXPECT_EQ(a.row_to_col[r], 3 - r);
  // Only the class term remains on a perfect box.
  EXPECT_NEAR(m(0, 3), 2.0 * FocalLoss(0.9, true), 1e-15);
}

}  // namespace
}  // namespace sparseplan
