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

#include "sparseplan/planner.h"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"

namespace sparseplan {
namespace {

Trajectory Line(Vec2 start, Vec2 step, size_t n = kPlanSteps) {
  Trajectory t;
  for (size_t i = 1; i <= n; ++i) {
    t.push_back({start.x + step.x * i, start.y + step.y * i});
  }
  return t;
}

// Parabolic path: lateral offset grows with the square of the step.
Trajectory Bent(Vec2 start, Vec2 step, double bend, size_t n = kPlanSteps) {
  Trajectory t = Line(start, step, n);
  for (size_t i = 0; i < n; ++i) {
    const double k = bend * static_cast<double>((i + 1) * (i + 1));
    t[i].x -= k * step.y;
    t[i].y += k * step.x;
  }
  return t;
}

AgentForecast Agent(Vec2 pos, double yaw, std::vector<Trajectory> modes,
                    std::vector<double> scores) {
  AgentForecast a;
  a.pose = Pose2(pos.x, pos.y, yaw);
  a.modes = {std::move(modes), std::move(scores)};
  return a;
}

std::vector<double> Headings(const Trajectory& t, double yaw0) {
  // Heading of the step to the next waypoint; the last waypoint and short
  // steps keep the previous heading.
  std::vector<double> out(t.size(), yaw0);
  double yaw = yaw0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (i + 1 < t.size()) {
      const double dx = t[i + 1].x - t[i].x, dy = t[i + 1].y - t[i].y;
      if (std::hypot(dx, dy) >= 1e-3) yaw = std::atan2(dy, dx);
    }
    out[i] = yaw;
  }
  return out;
}

// Independent check with polygon intersection.
bool OracleCollides(const Trajectory& plan, const VehicleDims& ego,
                    const std::vector<AgentForecast>& agents, size_t k) {
  const auto ego_yaws = Headings(plan, 0.0);
  for (const AgentForecast& a : agents) {
    for (size_t m : TopKModes(a.modes, k)) {
      const Trajectory& mode = a.modes.modes[m];
      const auto yaws = Headings(mode, a.pose.yaw());
      for (size_t t = 0; t < std::min(plan.size(), mode.size()); ++t) {
        const auto pe = oracle::RectCorners(
            {plan[t].x, plan[t].y, ego.length, ego.width, ego_yaws[t]});
        const auto pa = oracle::RectCorners(
            {mode[t].x, mode[t].y, a.dims.length, a.dims.width, yaws[t]});
        if (oracle::PolygonsIntersect(pe, pa)) return true;
      }
    }
  }
  return false;
}

TEST(CommandTest, NamesRoundTrip) {
  for (Command c : kAllCommands) EXPECT_EQ(ParseCommand(CommandName(c)), c);
  EXPECT_EQ(static_cast<int>(Command::kTurnLeft), 0);
  EXPECT_EQ(static_cast<int>(Command::kTurnRight), 1);
  EXPECT_EQ(static_cast<int>(Command::kGoStraight), 2);
  EXPECT_THROW(ParseCommand("reverse"), std::invalid_argument);
}

TEST(FilterTest, ReturnsCommandRow) {
  PlanProposalSet p;
  for (size_t c = 0; c < kNumCommands; ++c) {
    p.per_command[c] = {{Line({0, 0}, {1.0 * c, 0})}, {0.1 * c}};
  }
  EXPECT_EQ(&FilterByCommand(p, Command::kTurnRight), &p.per_command[1]);
  EXPECT_EQ(FilterByCommand(p, Command::kGoStraight).scores[0], 0.2);
}

TEST(CollisionTest, HeadOnCollides) {
  const Trajectory plan = Line({0, 0}, {2, 0});
  const std::vector<AgentForecast> agents = {
      Agent({20, 0}, std::numbers::pi, {Line({20, 0}, {-2, 0})}, {1.0})};
  EXPECT_TRUE(CheckPlanCollision(plan, {}, 0.0, agents));
}

TEST(CollisionTest, ParallelLanesClear) {
  const Trajectory plan = Line({0, 0}, {2, 0});
  const std::vector<AgentForecast> agents = {
      Agent({0, 3.5}, 0.0, {Line({0, 3.5}, {2, 0})}, {1.0})};
  EXPECT_FALSE(CheckPlanCollision(plan, {}, 0.0, agents));
}

TEST(CollisionTest, SamePlaceDifferentTimeIsClear) {
  // Agent crosses x = 6 on the ego path at step 6, ego is there at step 3.
  const Trajectory plan = Line({0, 0}, {2, 0});
  const std::vector<AgentForecast> agents = {Agent(
      {6, -18}, std::numbers::pi / 2, {Line({6, -18}, {0, 3})}, {1.0})};
  EXPECT_FALSE(CheckPlanCollision(plan, {}, 0.0, agents));
  // Shifted forward so it arrives at step 3.
  const std::vector<AgentForecast> early = {Agent(
      {6, -9}, std::numbers::pi / 2, {Line({6, -9}, {0, 3})}, {1.0})};
  EXPECT_TRUE(CheckPlanCollision(plan, {}, 0.0, early));
}

TEST(CollisionTest, OnlyTopModesChecked) {
  const Trajectory plan = Line({0, 0}, {2, 0});
  const Trajectory away = Line({10, 10}, {0, 2});
  const Trajectory into = Line({12, 0}, {-1, 0});
  const std::vector<AgentForecast> agents = {
      Agent({10, 10}, 0.0, {away, away, into}, {0.5, 0.3, 0.2})};
  EXPECT_FALSE(CheckPlanCollision(plan, {}, 0.0, agents, 2));
  EXPECT_TRUE(CheckPlanCollision(plan, {}, 0.0, agents, 3));
  EXPECT_THROW(CheckPlanCollision(plan, {}, 0.0, agents, 0),
               std::invalid_argument);
}

TEST(CollisionTest, NoAgentsNeverCollides) {
  EXPECT_FALSE(CheckPlanCollision(Line({0, 0}, {1, 1}), {}, 0.0, {}));
}

TEST(CollisionTest, MatchesPolygonOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(-25, 25), vel(-4, 4),
      speed(0, 5), ang(-std::numbers::pi, std::numbers::pi), bend(-0.05, 0.05);
  int hits = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const double h = ang(rng) / 4, s = speed(rng);
    const Trajectory plan =
        Bent({0, 0}, {s * std::cos(h), s * std::sin(h)}, bend(rng));
    std::vector<AgentForecast> agents;
    for (int a = 0; a < 3; ++a) {
      const Vec2 p{pos(rng), pos(rng)};
      std::vector<Trajectory> modes;
      std::vector<double> scores;
      for (int m = 0; m < 3; ++m) {
        modes.push_back(Bent(p, {vel(rng), vel(rng)}, bend(rng)));
        scores.push_back(speed(rng));
      }
      agents.push_back(Agent(p, ang(rng), modes, scores));
    }
    const bool want = OracleCollides(plan, {}, agents, 2);
    ASSERT_EQ(CheckPlanCollision(plan, {}, 0.0, agents), want) << trial;
    hits += want;
  }
  EXPECT_GT(hits, 100);
}

TEST(RescoreTest, ZeroesCollidingOnly) {
  const TrajectorySet props = {
      {Line({0, 0}, {2, 0}), Line({0, 0}, {0, -2})}, {0.8, 0.2}};
  const std::vector<AgentForecast> agents = {
      Agent({20, 0}, std::numbers::pi, {Line({20, 0}, {-2, 0})}, {1.0})};
  const RescoreResult r = CollisionAwareRescore(props, agents, {}, 0.0);
  EXPECT_EQ(r.scores, (std::vector<double>{0.0, 0.2}));
  EXPECT_EQ(r.collided, (std::vector<bool>{true, false}));

  const TrajectorySet again = {props.modes, r.scores};
  EXPECT_EQ(CollisionAwareRescore(again, agents, {}, 0.0).scores, r.scores);
}

TEST(RescoreTest, RejectsBadScores) {
  const TrajectorySet neg = {{Line({0, 0}, {1, 0})}, {-0.1}};
  EXPECT_THROW(CollisionAwareRescore(neg, {}, {}, 0.0), std::invalid_argument);
  const TrajectorySet ragged = {{Line({0, 0}, {1, 0})}, {0.1, 0.2}};
  EXPECT_THROW(CollisionAwareRescore(ragged, {}, {}, 0.0),
               std::invalid_argument);
}

PlanProposalSet Straight(std::vector<Trajectory> modes,
                         std::vector<double> scores) {
  PlanProposalSet p;
  p.per_command[static_cast<size_t>(Command::kGoStraight)] = {modes, scores};
  return p;
}

TEST(SelectTest, SkipsCollidingBest) {
  const auto p = Straight({Line({0, 0}, {2, 0}), Line({0, 0}, {1.5, -1})},
                          {0.9, 0.1});
  const std::vector<AgentForecast> agents = {
      Agent({20, 0}, std::numbers::pi, {Line({20, 0}, {-2, 0})}, {1.0})};
  const PlanSelection on =
      SelectTrajectory(p, Command::kGoStraight, agents, {}, 0.0);
  EXPECT_EQ(on.mode_index, 1u);
  EXPECT_FALSE(on.diagnostics.all_colliding);
  EXPECT_EQ(on.trajectory, p.per_command[2].modes[1]);

  const PlanSelection off = SelectTrajectory(p, Command::kGoStraight, agents,
                                             {}, 0.0, {.rescore = false});
  EXPECT_EQ(off.mode_index, 0u);
  EXPECT_TRUE(off.diagnostics.collided.empty());
  EXPECT_EQ(off.diagnostics.rescored_scores, off.diagnostics.original_scores);
}

TEST(SelectTest, ZeroScoredSafeCandidateStillWins) {
  const auto p = Straight({Line({0, 0}, {2, 0}), Line({0, 0}, {1.5, -1})},
                          {0.9, 0.0});
  const std::vector<AgentForecast> agents = {
      Agent({20, 0}, std::numbers::pi, {Line({20, 0}, {-2, 0})}, {1.0})};
  EXPECT_EQ(SelectTrajectory(p, Command::kGoStraight, agents, {}, 0.0)
                .mode_index,
            1u);
}

TEST(SelectTest, AllCollidingFallsBackToArgmax) {
  const auto p = Straight({Line({0, 0}, {2, 0}), Line({0, 0}, {2, 0.1})},
                          {0.3, 0.7});
  const std::vector<AgentForecast> agents = {
      Agent({20, 0}, std::numbers::pi, {Line({20, 0}, {-2, 0})}, {1.0})};
  const PlanSelection s =
      SelectTrajectory(p, Command::kGoStraight, agents, {}, 0.0);
  EXPECT_TRUE(s.diagnostics.all_colliding);
  EXPECT_EQ(s.mode_index, 1u);
}

TEST(SelectTest, EmptyRowThrows) {
  EXPECT_THROW(SelectTrajectory({}, Command::kTurnLeft, {}, {}, 0.0),
               std::invalid_argument);
}

std::vector<AgentForecast> RandomAgents(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-15, 25), vel(-4, 4),
      sc(0, 1), ang(-std::numbers::pi, std::numbers::pi);
  std::vector<AgentForecast> agents;
  for (int a = 0; a < 4; ++a) {
    const Vec2 p{pos(rng), pos(rng) / 2};
    std::vector<Trajectory> modes;
    std::vector<double> scores;
    for (size_t m = 0; m < kMotionModes; ++m) {
      modes.push_back(Line(p, {vel(rng), vel(rng)}, kMotionSteps));
      scores.push_back(sc(rng));
    }
    agents.push_back(Agent(p, ang(rng), modes, scores));
  }
  return agents;
}

PlanProposalSet RandomProposals(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> sc(0, 1), lat(-1, 1), fwd(0, 5);
  PlanProposalSet p;
  for (auto& row : p.per_command) {
    for (size_t m = 0; m < kPlanModes; ++m) {
      row.modes.push_back(Line({0, 0}, {fwd(rng), lat(rng)}));
      row.scores.push_back(sc(rng));
    }
  }
  return p;
}

TEST(SelectTest, ScaleInvariant) {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 300; ++trial) {
    PlanProposalSet p = RandomProposals(rng);
    const auto agents = RandomAgents(rng);
    const size_t base =
        SelectTrajectory(p, Command::kGoStraight, agents, {}, 0.0).mode_index;
    for (auto& row : p.per_command) {
      for (double& s : row.scores) s *= 3.7;
    }
    EXPECT_EQ(
        SelectTrajectory(p, Command::kGoStraight, agents, {}, 0.0).mode_index,
        base);
  }
}

TEST(SelectTest, PicksSafeWheneverOneExists) {
  std::mt19937_64 rng(41);
  int rescued = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const PlanProposalSet p = RandomProposals(rng);
    const auto agents = RandomAgents(rng);
    const Command cmd = kAllCommands[trial % kNumCommands];
    const TrajectorySet& row = p.For(cmd);
    bool any_safe = false;
    for (const auto& m : row.modes) {
      any_safe |= !OracleCollides(m, {}, agents, kRescoreTopK);
    }
    const PlanSelection s = SelectTrajectory(p, cmd, agents, {}, 0.0);
    EXPECT_EQ(s.command, cmd);
    if (any_safe) {
      EXPECT_FALSE(OracleCollides(s.trajectory, {}, agents, kRescoreTopK));
      rescued += s.mode_index != ArgMax(row.scores);
    }
  }
  EXPECT_GT(rescued, 0);
}

}  // namespace
}  // namespace sparseplan
