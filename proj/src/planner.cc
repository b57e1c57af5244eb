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

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sparseplan {

std::string_view CommandName(Command cmd) {
  switch (cmd) {
    case Command::kTurnLeft:
      return "turn_left";
    case Command::kTurnRight:
      return "turn_right";
    case Command::kGoStraight:
      return "go_straight";
  }
  return "unknown";
}

Command ParseCommand(std::string_view name) {
  for (Command cmd : kAllCommands) {
    if (CommandName(cmd) == name) return cmd;
  }
  throw std::invalid_argument("unknown command: " + std::string(name));
}

const TrajectorySet& FilterByCommand(const PlanProposalSet& proposals,
                                     Command cmd) {
  return proposals.For(cmd);
}

namespace {

// Agent boxes per forecast step for the selected modes.
struct AgentFootprints {
  // boxes[m][t]
  std::vector<std::vector<OBB2>> boxes;
};

AgentFootprints AgentBoxes(const AgentForecast& agent, size_t top_k) {
  AgentFootprints out;
  for (size_t m : TopKModes(agent.modes, top_k)) {
    const Trajectory& mode = agent.modes.modes[m];
    if (mode.empty()) continue;
    const std::vector<double> yaws = EstimateYaws(mode, agent.pose.yaw());
    std::vector<OBB2> boxes;
    boxes.reserve(mode.size());
    for (size_t t = 0; t < mode.size(); ++t) {
      boxes.push_back(OBB2::FromDims(mode[t], agent.dims.length,
                                     agent.dims.width, yaws[t]));
    }
    out.boxes.push_back(std::move(boxes));
  }
  return out;
}

bool Collides(std::span<const Vec2> plan, const VehicleDims& ego,
              double ego_yaw0, const std::vector<AgentFootprints>& agents) {
  if (plan.empty()) return false;
  const std::vector<double> yaws = EstimateYaws(plan, ego_yaw0);
  for (size_t t = 0; t < plan.size(); ++t) {
    const OBB2 ego_box =
        OBB2::FromDims(plan[t], ego.length, ego.width, yaws[t]);
    for (const AgentFootprints& agent : agents) {
      for (const auto& mode : agent.boxes) {
        if (t < mode.size() && ObbOverlap(ego_box, mode[t])) return true;
      }
    }
  }
  return false;
}

std::vector<AgentFootprints> AllAgentBoxes(
    std::span<const AgentForecast> agents, size_t top_k) {
  if (top_k == 0) throw std::invalid_argument("top_k_modes must be >= 1");
  std::vector<AgentFootprints> out;
  out.reserve(agents.size());
  for (const AgentForecast& a : agents) out.push_back(AgentBoxes(a, top_k));
  return out;
}

}  // namespace

bool CheckPlanCollision(std::span<const Vec2> plan, const VehicleDims& ego,
                        double ego_yaw0, std::span<const AgentForecast> agents,
                        size_t top_k_modes) {
  return Collides(plan, ego, ego_yaw0, AllAgentBoxes(agents, top_k_modes));
}

RescoreResult CollisionAwareRescore(const TrajectorySet& proposals,
                                    std::span<const AgentForecast> agents,
                                    const VehicleDims& ego, double ego_yaw0,
                                    size_t top_k_modes) {
  if (proposals.scores.size() != proposals.modes.size()) {
    throw std::invalid_argument("scores and modes differ in count");
  }
  for (double s : proposals.scores) {
    if (s < 0.0) throw std::invalid_argument("negative score");
  }
  const auto boxes = AllAgentBoxes(agents, top_k_modes);
  RescoreResult r;
  r.scores = proposals.scores;
  r.collided.assign(proposals.modes.size(), false);
  for (size_t i = 0; i < proposals.modes.size(); ++i) {
    if (Collides(proposals.modes[i], ego, ego_yaw0, boxes)) {
      r.collided[i] = true;
      r.scores[i] = 0.0;
    }
  }
  return r;
}

PlanSelection SelectTrajectory(const PlanProposalSet& proposals, Command cmd,
                               std::span<const AgentForecast> agents,
                               const VehicleDims& ego, double ego_yaw0,
                               const SelectionOptions& options) {
  const TrajectorySet& candidates = FilterByCommand(proposals, cmd);
  if (candidates.modes.empty()) {
    throw std::invalid_argument("no proposals for command");
  }
  PlanSelection sel;
  sel.command = cmd;
  SelectionDiagnostics& diag = sel.diagnostics;
  diag.original_scores = candidates.scores;
  diag.rescore_enabled = options.rescore;

  if (options.rescore) {
    RescoreResult r = CollisionAwareRescore(candidates, agents, ego, ego_yaw0,
                                            options.top_k_modes);
    diag.rescored_scores = std::move(r.scores);
    diag.collided = std::move(r.collided);
    diag.all_colliding =
        std::all_of(diag.collided.begin(), diag.collided.end(),
                    [](bool c) { return c; });
  } else {
    diag.rescored_scores = candidates.scores;
  }

  if (!options.rescore) {
    sel.mode_index = ArgMax(diag.rescored_scores);
  } else if (diag.all_colliding) {
    sel.mode_index = ArgMax(diag.original_scores);
  } else {
    // Best collision-free candidate; a zero-scored safe candidate still
    // beats the zeroed colliding ones.
    std::optional<size_t> best;
    for (size_t i = 0; i < diag.rescored_scores.size(); ++i) {
      if (diag.collided[i]) continue;
      if (!best || diag.rescored_scores[i] > diag.rescored_scores[*best]) {
        best = i;
      }
    }
    sel.mode_index = *best;
  }
  sel.trajectory = candidates.modes[sel.mode_index];
  return sel;
}

}  // namespace sparseplan
