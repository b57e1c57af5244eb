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

// JSON Lines formats for scenarios and plans.
//
// Scenario file: one header line
//   {"type": "header", "format": "sparseplan.scenario/1", "seed": ...,
//    "dt": 0.5, "num_frames": N, "config": {...}, "map": [[[x, y], ...], ...]}
// followed by one line per frame
//   {"type": "frame", "index": f, "command": "go_straight",
//    "ego": {"x", "y", "yaw", "velocity", "acceleration",
//            "angular_velocity", "steering_angle"},
//    "agents": [{"id", "x", "y", "yaw", "speed", "turn_rate", "width",
//                "length", "behavior"}, ...]}
//
// Plan file: one header line
//   {"type": "plan_header", "format": "sparseplan.plan/1",
//    "scenario_seed": ..., "rescore": true, "planner": "fan", ...}
// followed by one line per frame
//   {"type": "plan", "frame": f, "command": ..., "mode_index": i,
//    "trajectory": [[x, y], ...], "scores": [...], "rescored_scores": [...],
//    "collided": [...], "all_colliding": false, "rescore": "on",
//    "tracks": [{"id", "confidence", "x", "y", "yaw", "width", "length",
//                "vx", "vy", "modes": [[[x, y], ...], ...],
//                "mode_scores": [...]}, ...]}

#ifndef SPARSEPLAN_IO_H_
#define SPARSEPLAN_IO_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sparseplan/planner.h"
#include "sparseplan/sim.h"
#include "sparseplan/tracking.h"

namespace sparseplan {

// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json ScenarioConfigToJson(const ScenarioConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
ScenarioConfig ScenarioConfigFromJson(const nlohmann::json& j);

nlohmann::json PerceptionNoiseToJson(const PerceptionNoise& n);
PerceptionNoise PerceptionNoiseFromJson(const nlohmann::json& j);

nlohmann::json TrajectoryToJson(const Trajectory& t);
Trajectory TrajectoryFromJson(const nlohmann::json& j);

std::string ScenarioToJsonl(const Scenario& s);
// Throws DataError("line N: ...").
Scenario ScenarioFromJsonl(std::string_view text);

struct PlannedTrack {
  TrackId id = 0;
  double confidence = 0.0;
  AgentState state;  // pose, width, length; speed/turn_rate unused
  Vec2 velocity;
  TrajectorySet forecast;
};

struct PlanRecord {
  int64_t frame = 0;
  Command command = Command::kGoStraight;
  size_t mode_index = 0;
  Trajectory trajectory;
  SelectionDiagnostics diagnostics;
  std::vector<PlannedTrack> tracks;
};

struct PlanFile {
  uint64_t scenario_seed = 0;
  bool rescore = true;
  std::string planner = "fan";
  nlohmann::json parameters = nlohmann::json::object();
  std::vector<PlanRecord> records;
};

std::string PlanFileToJsonl(const PlanFile& p);
// Throws DataError("line N: ...").
PlanFile PlanFileFromJsonl(std::string_view text);

// Whole-file helpers; throw DataError with the path on IO failure.
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view data);

}  // namespace sparseplan

#endif  // SPARSEPLAN_IO_H_
