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

#include "sparseplan/metrics.h"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"

namespace sparseplan {
namespace {

Trajectory StraightPlan(double step = 2.0, double y = 0.0) {
  Trajectory t;
  for (size_t i = 1; i <= kPlanSteps; ++i) t.push_back({step * i, y});
  return t;
}

PlanningEvalSample Sample(Trajectory plan, Trajectory gt) {
  PlanningEvalSample s;
  s.plan = std::move(plan);
  s.gt = std::move(gt);
  return s;
}

TEST(PlanningL2Test, HorizonValues) {
  Trajectory plan = StraightPlan();
  plan[5].y = 0.6;
  const std::vector<PlanningEvalSample> s = {Sample(plan, StraightPlan())};
  const HorizonTable t = PlanningL2(s);
  EXPECT_EQ(t.at[0], 0.0);
  EXPECT_EQ(t.at[1], 0.0);
  EXPECT_DOUBLE_EQ(t.at[2], 0.6);
  EXPECT_DOUBLE_EQ(t.avg, 0.2);

  const HorizonTable c = PlanningL2(s, L2Mode::kCumulativeMean);
  EXPECT_EQ(c.at[1], 0.0);
  EXPECT_DOUBLE_EQ(c.at[2], 0.1);
}

TEST(PlanningL2Test, ConstantOffset) {
  const std::vector<PlanningEvalSample> s = {
      Sample(StraightPlan(2.0, 1.0), StraightPlan())};
  for (L2Mode mode : {L2Mode::kAtHorizon, L2Mode::kCumulativeMean}) {
    const HorizonTable t = PlanningL2(s, mode);
    for (double v : t.at) EXPECT_DOUBLE_EQ(v, 1.0);
    EXPECT_DOUBLE_EQ(t.avg, 1.0);
  }
}

TEST(PlanningL2Test, Errors) {
  EXPECT_THROW(PlanningL2({}), std::invalid_argument);
  Trajectory shortplan = StraightPlan();
  shortplan.pop_back();
  const std::vector<PlanningEvalSample> a = {Sample(shortplan, shortplan)};
  EXPECT_THROW(PlanningL2(a), std::invalid_argument);
  const std::vector<PlanningEvalSample> b = {Sample(StraightPlan(), shortplan)};
  EXPECT_THROW(PlanningL2(b), std::invalid_argument);
}

TEST(CollisionMetricTest, ObstacleOnPath) {
  PlanningEvalSample s = Sample(StraightPlan(), StraightPlan());
  s.agents.assign(kPlanSteps, {});
  // Sits on the 2 s waypoint only.
  s.agents[3] = {OBB2::FromDims({8, 0}, 1, 1, 0.3)};
  EXPECT_EQ(ObbCollisions(s), (std::array<bool, 3>{false, true, false}));
  EXPECT_EQ(GridCollisions(s), (std::array<bool, 3>{false, true, false}));
  const std::vector<PlanningEvalSample> v = {s};
  const HorizonTable r = CollisionRateObb(v);
  EXPECT_EQ(r.at[1], 1.0);
  EXPECT_DOUBLE_EQ(r.avg, 1.0 / 3.0);
  EXPECT_THROW(CollisionRateGrid(v, 0.0), std::invalid_argument);
}

TEST(CollisionMetricTest, NoObstaclesNoCollision) {
  const PlanningEvalSample s = Sample(StraightPlan(), StraightPlan());
  EXPECT_EQ(ObbCollisions(s), (std::array<bool, 3>{}));
  EXPECT_EQ(GridCollisions(s), (std::array<bool, 3>{}));
}

TEST(DivergenceSceneTest, SubCellObstacle) {
  const PlanningEvalSample s = SubCellObstacleScene();
  EXPECT_EQ(ObbCollisions(s), (std::array<bool, 3>{false, false, false}));
  EXPECT_EQ(GridCollisions(s, 0.5), (std::array<bool, 3>{false, true, true}));
  // Independent: ego edge at y = 1.05, obstacle edge at y = 1.45.
  const auto ego = oracle::RectCorners({6, 0.05, 4, 2, 0});
  const auto obs = oracle::RectCorners({6, 1.6, 0.3, 0.3, 0});
  EXPECT_FALSE(oracle::PolygonsIntersect(ego, obs));
  EXPECT_NEAR(oracle::RectSeparation({6, 0.05, 4, 2, 0}, {6, 1.6, 0.3, 0.3, 0}),
              0.4, 1e-12);
}

TEST(DivergenceSceneTest, HeadingChange) {
  const PlanningEvalSample s = HeadingChangeScene();
  const auto obb = ObbCollisions(s);
  const auto grid = GridCollisions(s, 0.5);
  EXPECT_FALSE(obb[2]);
  EXPECT_TRUE(grid[2]);
  // Last chord runs from 75 to 90 degrees on the circle: heading 82.5.
  const double yaw = 82.5 * std::numbers::pi / 180.0;
  const oracle::Rect turned{10, 10, 4, 2, yaw};
  const oracle::Rect frozen{10, 10, 4, 2, 0};
  const oracle::Rect obs{12.35, 10, 1, 1, 0};
  EXPECT_FALSE(oracle::PolygonsIntersect(oracle::RectCorners(turned),
                                         oracle::RectCorners(obs)));
  EXPECT_TRUE(oracle::PolygonsIntersect(oracle::RectCorners(frozen),
                                        oracle::RectCorners(obs)));
}

// Brute-force grid check over a fixed window.
bool OracleGrid(const PlanningEvalSample& s, size_t t, double res) {
  const oracle::Rect ego{s.plan[t].x, s.plan[t].y, s.ego.length + res,
                         s.ego.width + res, s.gt_yaw0};
  for (int i = -120; i < 120; ++i) {
    for (int j = -120; j < 120; ++j) {
      const double cx = (i + 0.5) * res, cy = (j + 0.5) * res;
      if (!oracle::RectContains(ego, cx, cy)) continue;
      for (const OBB2& o : s.agents[t]) {
        const oracle::Rect r{o.center().x, o.center().y,
                             2 * o.half_extents().x + res,
                             2 * o.half_extents().y + res, o.yaw()};
        if (oracle::RectContains(r, cx, cy)) return true;
      }
    }
  }
  return false;
}

PlanningEvalSample RandomScene(std::mt19937_64& rng, bool axis_aligned) {
  std::uniform_real_distribution<double> pos(-12, 12), dim(0.2, 4),
      ang(-std::numbers::pi, std::numbers::pi), lat(-0.8, 0.8);
  PlanningEvalSample s;
  s.gt_yaw0 = axis_aligned ? 0.0 : ang(rng) / 6;
  double y = 0.0;
  for (size_t i = 1; i <= kPlanSteps; ++i) {
    if (!axis_aligned) y += lat(rng);
    s.plan.push_back({1.7 * i, y});
  }
  s.gt = s.plan;
  s.agents.resize(kPlanSteps);
  for (auto& step : s.agents) {
    for (int k = 0; k < 3; ++k) {
      step.push_back(OBB2::FromDims({pos(rng) + 5, pos(rng) / 3}, dim(rng),
                                    dim(rng), axis_aligned ? 0.0 : ang(rng)));
    }
  }
  return s;
}

TEST(GridCollisionTest, MatchesBruteForce) {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 300; ++trial) {
    const PlanningEvalSample s = RandomScene(rng, trial % 2 == 0);
    const double res = trial % 3 == 0 ? 0.5 : 0.37;
    const auto got = GridCollisions(s, res);
    for (size_t h = 0; h < 3; ++h) {
      EXPECT_EQ(got[h], OracleGrid(s, kHorizonSteps[h], res)) << trial;
    }
  }
}

TEST(GridCollisionTest, AxisAlignedBoxOverlapImpliesGridHit) {
  std::mt19937_64 rng(51);
  int overlaps = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const PlanningEvalSample s = RandomScene(rng, true);
    const auto obb = ObbCollisions(s);
    const auto grid = GridCollisions(s);
    for (size_t h = 0; h < 3; ++h) {
      if (obb[h]) {
        EXPECT_TRUE(grid[h]);
        ++overlaps;
      }
    }
  }
  EXPECT_GT(overlaps, 50);
}

TEST(ObbCollisionTest, RigidInvariance) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(-50, 50), ang(-3, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const PlanningEvalSample s = RandomScene(rng, false);
    const Pose2 t(u(rng), u(rng), ang(rng));
    PlanningEvalSample m = s;
    for (Vec2& p : m.plan) p = t.TransformPoint(p);
    m.gt = m.plan;
    m.gt_yaw0 = s.gt_yaw0 + t.yaw();
    for (auto& step : m.agents) {
      for (OBB2& o : step) {
        o = OBB2::FromDims(t.TransformPoint(o.center()),
                           2 * o.half_extents().x, 2 * o.half_extents().y,
                           o.yaw() + t.yaw());
      }
    }
    // Skip near-contact scenes where rounding decides.
    bool marginal = false;
    const auto yaws = EstimateYaws(s.plan, s.gt_yaw0);
    for (size_t step : kHorizonSteps) {
      const oracle::Rect e{s.plan[step].x, s.plan[step].y, s.ego.length,
                           s.ego.width, yaws[step]};
      for (const OBB2& o : s.agents[step]) {
        const oracle::Rect r{o.center().x, o.center().y,
                             2 * o.half_extents().x, 2 * o.half_extents().y,
                             o.yaw()};
        marginal |= oracle::RectSeparation(e, r) < 1e-6 &&
                    oracle::RectPenetration(e, r) < 1e-6;
      }
    }
    if (marginal) continue;
    EXPECT_EQ(ObbCollisions(s), ObbCollisions(m)) << trial;
  }
}

MotionEvalSample Agent(Trajectory gt, std::vector<Trajectory> modes) {
  MotionEvalSample a;
  a.matched = true;
  a.gt = std::move(gt);
  a.prediction.modes = std::move(modes);
  a.prediction.scores.assign(a.prediction.modes.size(), 1.0);
  return a;
}

TEST(MotionMetricsTest, HandExample) {
  const Trajectory gt = {{1, 0}, {2, 0}, {3, 0}, {4, 0}};
  auto off = [&](double dy) {
    Trajectory t = gt;
    for (Vec2& p : t) p.y += dy;
    return t;
  };
  MotionEvalInput in;
  in.agents.push_back(Agent(gt, {off(5), off(0.5)}));  // hit
  in.agents.push_back(Agent(gt, {off(1.0)}));          // hit
  in.agents.push_back(Agent(gt, {off(3.0)}));          // miss
  MotionEvalSample unmatched;
  unmatched.gt = gt;
  in.agents.push_back(unmatched);
  in.false_positives = 2;
  const MotionMetrics m = ComputeMotionMetrics(in);
  EXPECT_DOUBLE_EQ(m.min_ade, 1.5);
  EXPECT_DOUBLE_EQ(m.min_fde, 1.5);
  EXPECT_DOUBLE_EQ(m.miss_rate, 1.0 / 3.0);
  EXPECT_EQ(m.hits, 2);
  EXPECT_EQ(m.num_gt, 4);
  EXPECT_EQ(m.num_evaluated, 3);
  // (2 - 0.5 * 2) / 4.
  EXPECT_DOUBLE_EQ(m.epa, 0.25);
}

TEST(MotionMetricsTest, EpaClampsAtZero) {
  MotionEvalInput in;
  in.agents.push_back(Agent({{1, 0}}, {{{1, 0}}}));
  in.false_positives = 10;
  EXPECT_EQ(ComputeMotionMetrics(in).epa, 0.0);
}

TEST(MotionMetricsTest, FdeAtLastValidStep) {
  MotionEvalSample a = Agent({{1, 0}, {2, 0}, {3, 0}}, {{{1, 0}, {2, 1}, {9, 9}}});
  a.valid = {true, true, false};
  MotionEvalInput in;
  in.agents.push_back(a);
  const MotionMetrics m = ComputeMotionMetrics(in);
  EXPECT_DOUBLE_EQ(m.min_fde, 1.0);
  EXPECT_DOUBLE_EQ(m.min_ade, 0.5);
}

TEST(MotionMetricsTest, NothingEvaluated) {
  MotionEvalInput in;
  MotionEvalSample lone;
  lone.gt = {{1, 0}};
  in.agents.push_back(lone);
  const MotionMetrics m = ComputeMotionMetrics(in);
  EXPECT_TRUE(std::isnan(m.min_ade));
  EXPECT_EQ(m.epa, 0.0);
  EXPECT_THROW(ComputeMotionMetrics({}), std::invalid_argument);
}

TEST(MotionMetricsTest, MatchesReference) {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> n(0, 2);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> count(1, 12), modes(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    MotionEvalInput in;
    in.false_positives = count(rng) - 1;
    const int agents = count(rng);
    for (int a = 0; a < agents; ++a) {
      MotionEvalSample s;
      s.matched = u(rng) < 0.8;
      for (size_t t = 0; t < kMotionSteps; ++t) {
        s.gt.push_back({n(rng), n(rng)});
        s.valid.push_back(u(rng) < 0.85);
      }
      if (u(rng) < 0.3) s.valid.clear();
      const int k = modes(rng);
      for (int m = 0; m < k; ++m) {
        Trajectory p = s.gt;
        for (Vec2& v : p) {
          v.x += n(rng) / 2;
          v.y += n(rng) / 2;
        }
        s.prediction.modes.push_back(p);
        s.prediction.scores.push_back(u(rng));
      }
      in.agents.push_back(s);
    }
    const MotionParams params{.miss_threshold = 1.5 + u(rng),
                              .epa_alpha = 0.5,
                              .epa_threshold = 2.0};
    const MotionMetrics got = ComputeMotionMetrics(in, params);
    const MotionMetrics want = oracle::ReferenceMotionMetrics(in, params);
    if (std::isnan(want.min_ade)) {
      EXPECT_TRUE(std::isnan(got.min_ade));
    } else {
      EXPECT_NEAR(got.min_ade, want.min_ade, 1e-9);
      EXPECT_NEAR(got.min_fde, want.min_fde, 1e-9);
      EXPECT_NEAR(got.miss_rate, want.miss_rate, 1e-12);
    }
    EXPECT_NEAR(got.epa, want.epa, 1e-12);
    EXPECT_EQ(got.hits, want.hits);
  }
}

}  // namespace
}  // namespace sparseplan
