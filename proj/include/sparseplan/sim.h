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

// Deterministic kinematic scenes that stand in for perception, prediction
// and planning networks: scenario generation, agent rollouts, constant
// position / constant velocity forecasts, noisy detections and fan-shaped
// plan proposals.
//
// The world frame is the ego frame of frame 0. Frames are 0.5 s apart.

#ifndef SPARSEPLAN_SIM_H_
#define SPARSEPLAN_SIM_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sparseplan/geometry.h"
#include "sparseplan/instances.h"
#include "sparseplan/planner.h"
#include "sparseplan/trajectory.h"

namespace sparseplan {

inline constexpr double kFrameDt = 0.5;
inline constexpr double kPerceptionRadius = 55.0;
inline constexpr double kMapLongitudinalRange = 60.0;
inline constexpr double kMapLateralRange = 30.0;

enum class Behavior { kConstantVelocity, kConstantTurnRate, kStationary };

std::string_view BehaviorName(Behavior b);
Behavior ParseBehavior(std::string_view name);

struct AgentState {
  int64_t id = 0;
  Pose2 pose;
  double speed = 0.0;
  double turn_rate = 0.0;
  double width = 1.85;
  double length = 4.5;
  Behavior behavior = Behavior::kConstantVelocity;

  Vec2 velocity() const;
};

// One exact integration step of the agent's behavior. ConstantVelocity
// ignores turn_rate; Stationary never moves.
AgentState StepAgent(const AgentState& state, double dt);

struct Rollout {
  Trajectory points;
  std::vector<double> yaws;
};

// The `steps` future poses of an agent, one per `dt`, excluding the current
// one. Throws std::invalid_argument unless dt > 0.
Rollout RolloutAgent(const AgentState& state, size_t steps, double dt);

struct ScenarioConfig {
  int num_frames = 20;
  int num_agents = 8;
  double spawn_radius = kPerceptionRadius;
  double min_spawn_distance = 6.0;
  // Relative weights of the agent behaviors.
  double weight_constant_velocity = 0.5;
  double weight_constant_turn_rate = 0.3;
  double weight_stationary = 0.2;
  double max_agent_speed = 12.0;
  double max_agent_turn_rate = 0.3;
  double ego_min_speed = 3.0;
  double ego_max_speed = 10.0;
  double ego_min_turn_radius = 15.0;
  double ego_max_turn_radius = 40.0;
  int num_map_polylines = 6;
  int points_per_polyline = static_cast<int>(MapPolyline::kDefaultNumPoints);
  // Lateral offset of the ego position kPlanSteps ahead beyond which the
  // frame's command is a turn.
  double command_lateral_threshold = 2.0;

  // Throws std::invalid_argument("invalid config: ...").
  void Validate() const;
};

struct ScenarioFrame {
  int64_t index = 0;
  Pose2 ego_pose;
  EgoStatus ego_status;
  std::vector<AgentState> agents;
  Command command = Command::kGoStraight;
};

struct Scenario {
  uint64_t seed = 0;
  ScenarioConfig config;
  double dt = kFrameDt;
  std::vector<ScenarioFrame> frames;
  std::vector<MapPolyline> map;
};

inline constexpr double kEgoWheelbase = 2.85;
inline constexpr BoxDims kEgoDims = {.width = 1.85, .height = 1.5,
                                     .length = 4.1};

// Deterministic in (seed, config). Agents spawn uniformly in the annulus
// [min_spawn_distance, spawn_radius] around the frame-0 ego and keep their
// behavior for the whole scene. The ego drives piecewise constant-turn-rate
// arcs at constant speed; each frame's command comes from the lateral offset
// of the ego kPlanSteps frames later. Map polylines lie inside the 60 m x
// 30 m window around the frame-0 ego.
Scenario GenerateScenario(uint64_t seed, const ScenarioConfig& config);

// Pose of frame `index`'s ego frame relative to frame `reference`'s.
Pose2 RelativeEgoPose(const Scenario& s, size_t reference, size_t index);

// Agent state re-expressed in an ego frame given the ego's world pose.
AgentState ToEgoFrame(const AgentState& world, const Pose2& ego_pose);

// Ego waypoints for the `steps` frames after `frame`, in that frame's ego
// frame. Returns fewer points near the end of the scenario.
Trajectory EgoFuture(const Scenario& s, size_t frame, size_t steps);

enum class BaselineKind { kConstantPosition, kConstantVelocity };

// Single-mode forecast with score 1: the current position repeated, or the
// current velocity integrated.
TrajectorySet BaselineForecast(BaselineKind kind, const AnchorBox& current,
                               size_t steps, double dt);

struct PerceptionNoise {
  double sigma_pos = 0.0;
  double sigma_yaw = 0.0;
  double drop_prob = 0.0;
  // Per frame, each of max(#agents, 1) slots spawns a false positive with
  // this probability.
  double fp_rate = 0.0;
  double fp_max_confidence = 0.4;
  // Confidence of a true detection is exp(-|e|^2 / (2 s^2)) with e the
  // position error and s this scale.
  double confidence_scale = 1.0;

  // Throws std::invalid_argument("invalid noise: ...").
  void Validate() const;
};

struct Detection {
  Instance instance;
  // Stable per emulated query: the GT id for true detections, a unique
  // negative number for false positives.
  int64_t query_slot = 0;
  std::optional<int64_t> gt_id;
};

// Per-frame detections in each frame's ego frame, for agents within
// kPerceptionRadius of the ego. Deterministic per seed. Detections carry the
// true velocity and dims.
std::vector<std::vector<Detection>> PerturbPerception(
    const Scenario& scenario, const PerceptionNoise& noise, uint64_t seed);

// Fan of `num_modes` constant-turn-rate arcs at `speed` from `ego`. The
// terminal heading changes are spread around the command's nominal change
// (0, +pi/2, -pi/2) by +-pi/4 for turns and +-pi/6 for going straight.
// Scores follow a Gaussian prior (sigma pi/8) on the offset from nominal and
// sum to 1.
TrajectorySet GeneratePlanProposals(const Pose2& ego, double speed,
                                    Command cmd, size_t num_modes,
                                    size_t steps, double dt);

// All three command rows.
PlanProposalSet GenerateProposalSet(const Pose2& ego, double speed,
                                    size_t num_modes, size_t steps, double dt);

}  // namespace sparseplan

#endif  // SPARSEPLAN_SIM_H_
