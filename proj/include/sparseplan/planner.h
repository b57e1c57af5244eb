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

// Hierarchical planning selection. Proposals are first narrowed to the
// driving command, then any proposal that collides with a confident motion
// forecast has its score zeroed, and the best remaining proposal wins.
//
// Timing: planning and forecast waypoints share a 2 Hz clock and both start
// one step ahead of now, so planning step t is checked against forecast step
// t. The current pose (t = 0) is never checked.

#ifndef SPARSEPLAN_PLANNER_H_
#define SPARSEPLAN_PLANNER_H_

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sparseplan/geometry.h"
#include "sparseplan/trajectory.h"

namespace sparseplan {

enum class Command { kTurnLeft = 0, kTurnRight = 1, kGoStraight = 2 };

inline constexpr size_t kNumCommands = 3;
inline constexpr std::array<Command, kNumCommands> kAllCommands = {
    Command::kTurnLeft, Command::kTurnRight, Command::kGoStraight};

std::string_view CommandName(Command cmd);
// Accepts the names produced by CommandName(); throws std::invalid_argument.
Command ParseCommand(std::string_view name);

inline constexpr size_t kPlanModes = 6;
inline constexpr size_t kPlanSteps = 6;
inline constexpr size_t kMotionModes = 6;
inline constexpr size_t kMotionSteps = 12;
inline constexpr size_t kRescoreTopK = 2;

// One TrajectorySet per command, indexed by static_cast<size_t>(Command).
struct PlanProposalSet {
  std::array<TrajectorySet, kNumCommands> per_command;

  const TrajectorySet& For(Command cmd) const {
    return per_command[static_cast<size_t>(cmd)];
  }
};

// Footprint dims in meters: length along heading, width across.
struct VehicleDims {
  double length = 4.1;
  double width = 1.85;
};

// Predicted futures of one surrounding agent, in the ego frame.
struct AgentForecast {
  VehicleDims dims;
  Pose2 pose;
  TrajectorySet modes;
};

// The command's row of the proposal set, untouched.
const TrajectorySet& FilterByCommand(const PlanProposalSet& proposals,
                                     Command cmd);

// True iff at some planning step the ego box (heading from EstimateYaws over
// the plan) overlaps the box of any agent placed on one of its `top_k_modes`
// best-scored forecasts at the same step (heading from EstimateYaws over
// that forecast, starting from the agent's current yaw).
bool CheckPlanCollision(std::span<const Vec2> plan, const VehicleDims& ego,
                        double ego_yaw0, std::span<const AgentForecast> agents,
                        size_t top_k_modes = kRescoreTopK);

struct RescoreResult {
  std::vector<double> scores;
  std::vector<bool> collided;
};

// Zeroes the score of every colliding proposal. Scores must be
// non-negative; throws std::invalid_argument("negative score") otherwise.
RescoreResult CollisionAwareRescore(const TrajectorySet& proposals,
                                    std::span<const AgentForecast> agents,
                                    const VehicleDims& ego, double ego_yaw0,
                                    size_t top_k_modes = kRescoreTopK);

struct SelectionOptions {
  bool rescore = true;
  size_t top_k_modes = kRescoreTopK;
};

struct SelectionDiagnostics {
  std::vector<double> original_scores;
  // Equal to original_scores when rescoring is off.
  std::vector<double> rescored_scores;
  // Empty when rescoring is off.
  std::vector<bool> collided;
  bool rescore_enabled = true;
  // Every candidate collided; the selection fell back to the original
  // argmax.
  bool all_colliding = false;
};

struct PlanSelection {
  Command command = Command::kGoStraight;
  size_t mode_index = 0;
  Trajectory trajectory;
  SelectionDiagnostics diagnostics;
};

// Throws std::invalid_argument when the command's row is empty.
PlanSelection SelectTrajectory(const PlanProposalSet& proposals, Command cmd,
                               std::span<const AgentForecast> agents,
                               const VehicleDims& ego, double ego_yaw0,
                               const SelectionOptions& options = {});

}  // namespace sparseplan

#endif  // SPARSEPLAN_PLANNER_H_
