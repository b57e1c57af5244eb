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

// Run-level plumbing behind the command line: configuration, seed
// derivation, and the generate / plan / evaluate / cluster commands.

#ifndef SPARSEPLAN_APP_H_
#define SPARSEPLAN_APP_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sparseplan/anchor_init.h"
#include "sparseplan/io.h"
#include "sparseplan/metrics.h"
#include "sparseplan/sim.h"

namespace sparseplan {

// Bad flags or configuration values.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  uint64_t seed = 0;
  int num_scenarios = 10;
  ScenarioConfig scenario;
  PerceptionNoise noise = {.sigma_pos = 0.2,
                           .sigma_yaw = 0.05,
                           .drop_prob = 0.05,
                           .fp_rate = 0.05};

  // Planner.
  std::string planner = "fan";  // "fan" or "gt"
  bool rescore = true;
  int plan_modes = static_cast<int>(kPlanModes);
  int plan_steps = static_cast<int>(kPlanSteps);
  int motion_steps = static_cast<int>(kMotionSteps);
  int top_k_modes = static_cast<int>(kRescoreTopK);
  int memory_frames = 3;
  double track_threshold = 0.2;
  // Scores of the constant-velocity and constant-position forecast modes.
  double cv_mode_score = 0.7;

  // Metrics.
  double miss_threshold = 2.0;
  double epa_alpha = 0.5;
  double epa_threshold = 2.0;
  double grid_resolution = kDefaultGridResolution;
  double match_distance = 2.0;
  L2Mode l2_mode = L2Mode::kAtHorizon;
  bool reference_scenes = false;

  // Clustering.
  int cluster_k = 900;
  int cluster_k_polylines = 100;

  // Throws UsageError("invalid config: ...").
  void Validate() const;
};

nlohmann::json RunConfigToJson(const RunConfig& c);
// Overlays `j` on `base`. Unknown keys are rejected. Throws UsageError.
RunConfig RunConfigFromJson(const nlohmann::json& j,
                            const RunConfig& base = {});

uint64_t SplitMix64(uint64_t x);
// Seed of scenario i: SplitMix64(master + (i + 1) * 0x9E3779B97F4A7C15).
uint64_t DeriveScenarioSeed(uint64_t master, uint64_t index);
// Seed of the perception noise stream of one scenario.
uint64_t DerivePerceptionSeed(uint64_t scenario_seed);

// Writes scenario_NNNN.jsonl files and manifest.json into `out_dir` and
// returns the manifest.
nlohmann::json RunGenerate(const RunConfig& config, const std::string& out_dir);

// perturb -> track -> forecast -> propose -> select for every frame.
PlanFile PlanScenario(const Scenario& scenario, const RunConfig& config);

// Plans every scenario_*.jsonl in `scenario_dir` into plan_*.jsonl files.
// With `ablation` both settings are written, to rescore_on/ and
// rescore_off/. Returns a summary with per-file digests.
nlohmann::json RunPlan(const RunConfig& config,
                       const std::string& scenario_dir,
                       const std::string& out_dir, bool ablation);

// Report over paired scenarios and plans. Throws DataError on mismatched
// pairs or horizons.
nlohmann::json EvaluatePlans(const std::vector<Scenario>& scenarios,
                             const std::vector<PlanFile>& plans,
                             const RunConfig& config);

std::string FormatReport(const nlohmann::json& report);

// Evaluates `plan_dir`, or both of its rescore_on/ and rescore_off/
// subdirectories when present. Writes report JSON and text files into
// `out_dir` and returns the text.
std::string RunEvaluate(const RunConfig& config,
                        const std::string& scenario_dir,
                        const std::string& plan_dir,
                        const std::string& out_dir);

struct ClusterCorpus {
  std::vector<Vec3> centers;
  std::vector<MapPolyline> polylines;
};

// JSON Lines with one {"center": [x, y, z]} or {"polyline": [[x, y], ...]}
// per line. Throws DataError("line N: ...").
ClusterCorpus ParseClusterCorpus(std::string_view text);
// Agent centers seen from each frame's ego, plus the map polylines.
ClusterCorpus CorpusFromScenarios(const std::vector<Scenario>& scenarios);

struct ClusterOutput {
  AnchorSet anchors;
  double box_objective = 0.0;
  double polyline_objective = 0.0;
};

// Polylines are clustered only when the corpus has some. Throws DataError
// when k exceeds the corpus.
ClusterOutput ClusterCorpusAnchors(const ClusterCorpus& corpus,
                                   const RunConfig& config);

// Reads the corpus from `corpus_path`, or from the scenarios in
// `scenario_dir` when the path is empty, and writes the anchors JSON to
// `out_path`. Returns the printed summary.
std::string RunCluster(const RunConfig& config, const std::string& corpus_path,
                       const std::string& scenario_dir,
                       const std::string& out_path);

// Sorted scenario_*.jsonl paths of a directory.
std::vector<std::string> ListScenarioFiles(const std::string& dir);

}  // namespace sparseplan

#endif  // SPARSEPLAN_APP_H_
