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

#include "sparseplan/app.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <unordered_map>

#include "sparseplan/anchor_init.h"
#include "sparseplan/tracking.h"

namespace sparseplan {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr uint64_t kPerceptionSalt = 0x5045524345505421ULL;
// Keeps ids of different scenarios apart when their frames are pooled.
constexpr int64_t kIdStride = 1'000'000;

std::string_view L2ModeName(L2Mode m) {
  return m == L2Mode::kAtHorizon ? "at_horizon" : "cumulative_mean";
}

L2Mode ParseL2Mode(std::string_view s) {
  if (s == "at_horizon") return L2Mode::kAtHorizon;
  if (s == "cumulative_mean") return L2Mode::kCumulativeMean;
  throw UsageError("invalid config: unknown l2_mode " + std::string(s));
}

void Check(bool ok, const std::string& what) {
  if (!ok) throw UsageError("invalid config: " + what);
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir + ": " + ec.message());
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// "scenario_0003.jsonl" -> "plan_0003.jsonl".
std::string PlanNameFor(const std::string& scenario_path) {
  const std::string name = fs::path(scenario_path).filename().string();
  return "plan_" + name.substr(std::string("scenario_").size());
}

Scenario LoadScenario(const std::string& path) {
  try {
    return ScenarioFromJsonl(ReadFile(path));
  } catch (const std::invalid_argument& e) {
    throw DataError(path + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

PlanFile LoadPlan(const std::string& path) {
  try {
    return PlanFileFromJsonl(ReadFile(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

json TableJson(const HorizonTable& t) {
  json j = json::object();
  for (size_t h = 0; h < kHorizonNames.size(); ++h) j[kHorizonNames[h]] = t.at[h];
  j["avg"] = t.avg;
  return j;
}

json VerdictJson(const std::array<bool, 3>& v) {
  json j = json::object();
  for (size_t h = 0; h < kHorizonNames.size(); ++h) j[kHorizonNames[h]] = v[h];
  return j;
}

const AgentState* FindAgent(const ScenarioFrame& frame, int64_t id) {
  for (const AgentState& a : frame.agents) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

}  // namespace

void RunConfig::Validate() const {
  Check(num_scenarios >= 0, "num_scenarios must be >= 0");
  try {
    scenario.Validate();
    noise.Validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Check(planner == "fan" || planner == "gt", "planner must be fan or gt");
  Check(plan_modes >= 1, "plan_modes must be >= 1");
  Check(plan_steps >= 1, "plan_steps must be >= 1");
  Check(motion_steps >= 1, "motion_steps must be >= 1");
  Check(top_k_modes >= 1, "top_k_modes must be >= 1");
  Check(memory_frames >= 1, "memory_frames must be >= 1");
  Check(track_threshold >= 0.0 && track_threshold <= 1.0,
        "track_threshold must be in [0, 1]");
  Check(cv_mode_score >= 0.0 && cv_mode_score <= 1.0,
        "cv_mode_score must be in [0, 1]");
  Check(miss_threshold > 0.0, "miss_threshold must be > 0");
  Check(epa_alpha >= 0.0, "epa_alpha must be >= 0");
  Check(epa_threshold > 0.0, "epa_threshold must be > 0");
  Check(grid_resolution > 0.0, "grid_resolution must be > 0");
  Check(match_distance > 0.0, "match_distance must be > 0");
  Check(cluster_k >= 1, "cluster_k must be >= 1");
  Check(cluster_k_polylines >= 1, "cluster_k_polylines must be >= 1");
}

json RunConfigToJson(const RunConfig& c) {
  return {{"seed", c.seed},
          {"num_scenarios", c.num_scenarios},
          {"scenario", ScenarioConfigToJson(c.scenario)},
          {"noise", PerceptionNoiseToJson(c.noise)},
          {"planner", c.planner},
          {"rescore", c.rescore},
          {"plan_modes", c.plan_modes},
          {"plan_steps", c.plan_steps},
          {"motion_steps", c.motion_steps},
          {"top_k_modes", c.top_k_modes},
          {"memory_frames", c.memory_frames},
          {"track_threshold", c.track_threshold},
          {"cv_mode_score", c.cv_mode_score},
          {"miss_threshold", c.miss_threshold},
          {"epa_alpha", c.epa_alpha},
          {"epa_threshold", c.epa_threshold},
          {"grid_resolution", c.grid_resolution},
          {"match_distance", c.match_distance},
          {"l2_mode", L2ModeName(c.l2_mode)},
          {"reference_scenes", c.reference_scenes},
          {"cluster_k", c.cluster_k},
          {"cluster_k_polylines", c.cluster_k_polylines}};
}

RunConfig RunConfigFromJson(const json& j, const RunConfig& base) {
  if (!j.is_object()) throw UsageError("invalid config: expected an object");
  RunConfig c = base;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "seed") c.seed = v.get<uint64_t>();
      else if (key == "num_scenarios") c.num_scenarios = v.get<int>();
      else if (key == "scenario") {
        json merged = ScenarioConfigToJson(c.scenario);
        if (!v.is_object()) throw UsageError("invalid config: scenario");
        for (const auto& [k2, v2] : v.items()) merged[k2] = v2;
        c.scenario = ScenarioConfigFromJson(merged);
      } else if (key == "noise") {
        json merged = PerceptionNoiseToJson(c.noise);
        if (!v.is_object()) throw UsageError("invalid config: noise");
        for (const auto& [k2, v2] : v.items()) merged[k2] = v2;
        c.noise = PerceptionNoiseFromJson(merged);
      }
      else if (key == "planner") c.planner = v.get<std::string>();
      else if (key == "rescore") c.rescore = v.get<bool>();
      else if (key == "plan_modes") c.plan_modes = v.get<int>();
      else if (key == "plan_steps") c.plan_steps = v.get<int>();
      else if (key == "motion_steps") c.motion_steps = v.get<int>();
      else if (key == "top_k_modes") c.top_k_modes = v.get<int>();
      else if (key == "memory_frames") c.memory_frames = v.get<int>();
      else if (key == "track_threshold") c.track_threshold = v.get<double>();
      else if (key == "cv_mode_score") c.cv_mode_score = v.get<double>();
      else if (key == "miss_threshold") c.miss_threshold = v.get<double>();
      else if (key == "epa_alpha") c.epa_alpha = v.get<double>();
      else if (key == "epa_threshold") c.epa_threshold = v.get<double>();
      else if (key == "grid_resolution") c.grid_resolution = v.get<double>();
      else if (key == "match_distance") c.match_distance = v.get<double>();
      else if (key == "l2_mode") c.l2_mode = ParseL2Mode(v.get<std::string>());
      else if (key == "reference_scenes") c.reference_scenes = v.get<bool>();
      else if (key == "cluster_k") c.cluster_k = v.get<int>();
      else if (key == "cluster_k_polylines") c.cluster_k_polylines = v.get<int>();
      else throw UsageError("invalid config: unknown key " + key);
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  c.Validate();
  return c;
}

uint64_t SplitMix64(uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t DeriveScenarioSeed(uint64_t master, uint64_t index) {
  return SplitMix64(master + (index + 1) * kGolden);
}

uint64_t DerivePerceptionSeed(uint64_t scenario_seed) {
  return SplitMix64(scenario_seed ^ kPerceptionSalt);
}

json RunGenerate(const RunConfig& config, const std::string& out_dir) {
  config.Validate();
  EnsureDir(out_dir);
  json files = json::array();
  for (int i = 0; i < config.num_scenarios; ++i) {
    const uint64_t seed = DeriveScenarioSeed(config.seed, i);
    const std::string text =
        ScenarioToJsonl(GenerateScenario(seed, config.scenario));
    char name[32];
    std::snprintf(name, sizeof name, "scenario_%04d.jsonl", i);
    WriteFile(JoinPath(out_dir, name), text);
    files.push_back({{"index", i},
                     {"seed", seed},
                     {"file", name},
                     {"sha256", Sha256Hex(text)}});
  }
  json manifest = {
      {"master_seed", config.seed},
      {"seed_scheme",
       "splitmix64(master_seed + (index + 1) * 0x9E3779B97F4A7C15)"},
      {"num_scenarios", config.num_scenarios},
      {"scenario_config", ScenarioConfigToJson(config.scenario)},
      {"scenarios", std::move(files)}};
  WriteFile(JoinPath(out_dir, "manifest.json"), manifest.dump(2) + "\n");
  return manifest;
}

PlanFile PlanScenario(const Scenario& scenario, const RunConfig& config) {
  PlanFile out;
  out.scenario_seed = scenario.seed;
  out.rescore = config.rescore;
  out.planner = config.planner;
  out.parameters = {{"plan_modes", config.plan_modes},
                    {"plan_steps", config.plan_steps},
                    {"motion_steps", config.motion_steps},
                    {"top_k_modes", config.top_k_modes},
                    {"memory_frames", config.memory_frames},
                    {"track_threshold", config.track_threshold},
                    {"cv_mode_score", config.cv_mode_score},
                    {"perception_seed", DerivePerceptionSeed(scenario.seed)},
                    {"noise", PerceptionNoiseToJson(config.noise)}};

  const auto detections = PerturbPerception(
      scenario, config.noise, DerivePerceptionSeed(scenario.seed));
  TrackerState tracker;
  InstanceMemoryQueue memory(static_cast<size_t>(config.memory_frames));
  // A detection slot stands in for a propagated query: once its instance
  // has an ID, later detections from the same slot inherit it.
  std::map<int64_t, TrackId> slot_ids;
  const VehicleDims ego_dims{kEgoDims.length, kEgoDims.width};
  const auto motion_steps = static_cast<size_t>(config.motion_steps);

  for (size_t f = 0; f < scenario.frames.size(); ++f) {
    const ScenarioFrame& frame = scenario.frames[f];
    const auto frame_index = static_cast<int64_t>(f);
    std::vector<Instance> instances;
    instances.reserve(detections[f].size());
    for (const Detection& d : detections[f]) {
      Instance inst = d.instance;
      if (auto it = slot_ids.find(d.query_slot); it != slot_ids.end()) {
        inst.AssignTrackId(it->second);
      }
      instances.push_back(std::move(inst));
    }
    tracker.AssignIds(instances, frame_index, config.track_threshold);
    for (size_t i = 0; i < instances.size(); ++i) {
      if (instances[i].has_track_id()) {
        slot_ids.emplace(detections[f][i].query_slot, *instances[i].track_id());
      }
    }
    memory.Push(frame_index, instances);

    PlanRecord record;
    record.frame = frame_index;
    record.command = frame.command;
    std::vector<AgentForecast> forecasts;
    for (const Instance& inst : instances) {
      if (!inst.has_track_id()) continue;
      const TrackId id = *inst.track_id();
      // Confidence smoothed over the track's memory.
      double conf = 0.0;
      const auto history = memory.Query(id);
      for (const Instance& h : history) conf += h.confidence();
      conf /= static_cast<double>(history.size());

      const AnchorBox& a = inst.anchor();
      const BoxState box = DecodeAnchor(a);
      TrajectorySet modes;
      modes.modes.push_back(BaselineForecast(BaselineKind::kConstantVelocity, a,
                                             motion_steps, scenario.dt)
                                .modes[0]);
      modes.modes.push_back(BaselineForecast(BaselineKind::kConstantPosition,
                                             a, motion_steps, scenario.dt)
                                .modes[0]);
      modes.scores = {config.cv_mode_score, 1.0 - config.cv_mode_score};

      PlannedTrack track;
      track.id = id;
      track.confidence = conf;
      track.state.id = id;
      track.state.pose = Pose2(a.x, a.y, box.yaw);
      track.state.width = box.dims.width;
      track.state.length = box.dims.length;
      track.velocity = {a.vx, a.vy};
      track.forecast = modes;
      record.tracks.push_back(track);
      forecasts.push_back({{box.dims.length, box.dims.width},
                           track.state.pose,
                           std::move(modes)});
    }

    if (config.planner == "gt") {
      record.mode_index = 0;
      record.trajectory =
          EgoFuture(scenario, f, static_cast<size_t>(config.plan_steps));
      record.diagnostics.original_scores = {1.0};
      record.diagnostics.rescored_scores = {1.0};
      record.diagnostics.rescore_enabled = false;
    } else {
      const PlanProposalSet proposals = GenerateProposalSet(
          Pose2::Identity(), frame.ego_status.velocity,
          static_cast<size_t>(config.plan_modes),
          static_cast<size_t>(config.plan_steps), scenario.dt);
      PlanSelection sel = SelectTrajectory(
          proposals, frame.command, forecasts, ego_dims, 0.0,
          {config.rescore, static_cast<size_t>(config.top_k_modes)});
      record.mode_index = sel.mode_index;
      record.trajectory = std::move(sel.trajectory);
      record.diagnostics = std::move(sel.diagnostics);
    }
    out.records.push_back(std::move(record));
  }
  return out;
}

std::vector<std::string> ListScenarioFiles(const std::string& dir) {
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw DataError("cannot list " + dir + ": " + ec.message());
  std::vector<std::string> out;
  for (const auto& entry : it) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("scenario_") &&
        name.ends_with(".jsonl")) {
      out.push_back(entry.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

json RunPlan(const RunConfig& config, const std::string& scenario_dir,
             const std::string& out_dir, bool ablation) {
  config.Validate();
  const auto paths = ListScenarioFiles(scenario_dir);
  std::vector<std::pair<std::string, bool>> runs;
  if (ablation) {
    runs = {{JoinPath(out_dir, "rescore_on"), true},
            {JoinPath(out_dir, "rescore_off"), false}};
  } else {
    runs = {{out_dir, config.rescore}};
  }
  json summary = json::array();
  for (const auto& [dir, rescore] : runs) EnsureDir(dir);
  for (const std::string& path : paths) {
    const Scenario scenario = LoadScenario(path);
    for (const auto& [dir, rescore] : runs) {
      RunConfig c = config;
      c.rescore = rescore;
      const PlanFile plan = PlanScenario(scenario, c);
      const std::string text = PlanFileToJsonl(plan);
      const std::string name = PlanNameFor(path);
      WriteFile(JoinPath(dir, name), text);
      int64_t all_colliding = 0;
      for (const PlanRecord& r : plan.records) {
        all_colliding += r.diagnostics.all_colliding ? 1 : 0;
      }
      summary.push_back({{"file", name},
                         {"rescore", rescore ? "on" : "off"},
                         {"frames", plan.records.size()},
                         {"all_colliding_frames", all_colliding},
                         {"sha256", Sha256Hex(text)}});
    }
  }
  return summary;
}

json EvaluatePlans(const std::vector<Scenario>& scenarios,
                   const std::vector<PlanFile>& plans,
                   const RunConfig& config) {
  if (scenarios.size() != plans.size()) {
    throw DataError("scenario and plan counts differ");
  }
  std::vector<PlanningEvalSample> planning;
  MotionEvalInput motion;
  TrackingEvalInput tracking;
  const VehicleDims ego_dims{kEgoDims.length, kEgoDims.width};
  const auto motion_steps = static_cast<size_t>(config.motion_steps);

  for (size_t si = 0; si < scenarios.size(); ++si) {
    const Scenario& s = scenarios[si];
    const PlanFile& p = plans[si];
    if (p.scenario_seed != s.seed) {
      throw DataError("plan " + std::to_string(si) +
                      " was made for a different scenario seed");
    }
    const int64_t id_offset = static_cast<int64_t>(si) * kIdStride;
    for (const PlanRecord& r : p.records) {
      if (r.frame < 0 || r.frame >= static_cast<int64_t>(s.frames.size())) {
        throw DataError("plan frame " + std::to_string(r.frame) +
                        " out of range");
      }
      const auto f = static_cast<size_t>(r.frame);
      const ScenarioFrame& frame = s.frames[f];

      // Planning: frames with a full ground-truth future.
      const auto plan_steps = static_cast<size_t>(config.plan_steps);
      const Trajectory gt = EgoFuture(s, f, plan_steps);
      if (gt.size() == plan_steps) {
        if (r.trajectory.size() != plan_steps) {
          throw DataError("horizon mismatch: plan for frame " +
                          std::to_string(r.frame) + " has " +
                          std::to_string(r.trajectory.size()) +
                          " waypoints, expected " + std::to_string(plan_steps));
        }
        PlanningEvalSample sample;
        sample.plan = r.trajectory;
        sample.gt = gt;
        sample.gt_yaw0 = 0.0;
        sample.ego = ego_dims;
        for (size_t t = 1; t <= gt.size(); ++t) {
          std::vector<OBB2> boxes;
          for (const AgentState& a : s.frames[f + t].agents) {
            const AgentState local = ToEgoFrame(a, frame.ego_pose);
            boxes.push_back(OBB2::FromDims(local.pose.translation(), a.length,
                                           a.width, local.pose.yaw()));
          }
          sample.agents.push_back(std::move(boxes));
        }
        planning.push_back(std::move(sample));
      }

      // GT agents in perception range.
      std::vector<AgentState> visible;
      for (const AgentState& a : frame.agents) {
        const AgentState local = ToEgoFrame(a, frame.ego_pose);
        if (local.pose.translation().Norm() <= kPerceptionRadius) {
          visible.push_back(local);
        }
      }
      std::vector<Vec2> gt_centers, pred_centers;
      std::vector<double> confidences;
      for (const AgentState& a : visible) gt_centers.push_back(a.pose.translation());
      for (const PlannedTrack& t : r.tracks) {
        pred_centers.push_back(t.state.pose.translation());
        confidences.push_back(t.confidence);
      }

      TrackingFrame tf;
      for (const AgentState& a : visible) {
        tf.gt.push_back({a.id + id_offset, a.pose.translation()});
      }
      for (const PlannedTrack& t : r.tracks) {
        tf.predictions.push_back(
            {t.id + id_offset, t.state.pose.translation(), t.confidence});
      }
      tracking.push_back(std::move(tf));

      // Motion: frames with at least one future step.
      if (f + 1 >= s.frames.size()) continue;
      const auto match = GreedyCenterMatch(pred_centers, confidences,
                                           gt_centers, config.match_distance);
      std::vector<std::optional<size_t>> gt_to_pred(visible.size());
      for (size_t pi = 0; pi < match.size(); ++pi) {
        if (match[pi]) {
          gt_to_pred[*match[pi]] = pi;
        } else {
          ++motion.false_positives;
        }
      }
      const Pose2 inv = frame.ego_pose.Inverse();
      for (size_t g = 0; g < visible.size(); ++g) {
        MotionEvalSample sample;
        for (size_t k = 1; k <= motion_steps; ++k) {
          const AgentState* later =
              f + k < s.frames.size() ? FindAgent(s.frames[f + k], visible[g].id)
                                      : nullptr;
          sample.gt.push_back(later ? inv.TransformPoint(later->pose.translation())
                                    : Vec2{});
          sample.valid.push_back(later != nullptr);
        }
        if (gt_to_pred[g]) {
          const TrajectorySet& fc = r.tracks[*gt_to_pred[g]].forecast;
          for (const Trajectory& m : fc.modes) {
            if (m.size() < motion_steps) {
              throw DataError("forecast shorter than motion horizon");
            }
          }
          sample.matched = true;
          sample.prediction = fc;
        }
        motion.agents.push_back(std::move(sample));
      }
    }
  }

  json report;
  report["parameters"] = {
      {"plan_steps", config.plan_steps},
      {"horizon_steps", kHorizonSteps},
      {"horizon_names", kHorizonNames},
      {"frame_dt", kFrameDt},
      {"l2_mode", L2ModeName(config.l2_mode)},
      {"grid_resolution", config.grid_resolution},
      {"collision_check", "obb_sat"},
      {"miss_threshold", config.miss_threshold},
      {"epa_alpha", config.epa_alpha},
      {"epa_threshold", config.epa_threshold},
      {"match_distance", config.match_distance},
      {"motion_steps", config.motion_steps},
      {"perception_radius", kPerceptionRadius}};
  report["num_scenarios"] = scenarios.size();
  report["num_planning_samples"] = planning.size();

  try {
    if (!planning.empty()) {
      report["planning"] = {
          {"l2", TableJson(PlanningL2(planning, config.l2_mode))},
          {"collision_obb", TableJson(CollisionRateObb(planning))},
          {"collision_grid",
           TableJson(CollisionRateGrid(planning, config.grid_resolution))}};
      int64_t diverging = 0;
      for (const PlanningEvalSample& sample : planning) {
        if (ObbCollisions(sample) != GridCollisions(sample, config.grid_resolution)) {
          ++diverging;
        }
      }
      report["planning"]["obb_grid_diverging_samples"] = diverging;
    }
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }

  if (!motion.agents.empty()) {
    const MotionMetrics m = ComputeMotionMetrics(
        motion, {config.miss_threshold, config.epa_alpha, config.epa_threshold});
    report["motion"] = {{"min_ade", m.min_ade},
                        {"min_fde", m.min_fde},
                        {"miss_rate", m.miss_rate},
                        {"epa", m.epa},
                        {"num_gt", m.num_gt},
                        {"num_evaluated", m.num_evaluated},
                        {"hits", m.hits},
                        {"false_positives", m.false_positives}};
  }

  int64_t num_gt = 0;
  for (const TrackingFrame& tf : tracking) num_gt += static_cast<int64_t>(tf.gt.size());
  if (num_gt > 0) {
    const TrackingMetrics t = ComputeTrackingMetrics(tracking, config.match_distance);
    report["tracking"] = {{"amota", t.amota},
                          {"amotp", t.amotp},
                          {"recall", t.recall},
                          {"id_switches", t.id_switches},
                          {"num_gt", t.num_gt}};
  }

  if (config.reference_scenes) {
    json scenes = json::array();
    const std::pair<const char*, PlanningEvalSample> refs[] = {
        {"sub_cell_obstacle", SubCellObstacleScene()},
        {"heading_change", HeadingChangeScene()}};
    for (const auto& [name, sample] : refs) {
      const auto obb = ObbCollisions(sample);
      const auto grid = GridCollisions(sample, config.grid_resolution);
      scenes.push_back({{"name", name},
                        {"obb", VerdictJson(obb)},
                        {"grid", VerdictJson(grid)},
                        {"diverges", obb != grid}});
    }
    report["reference_scenes"] = std::move(scenes);
  }
  return report;
}

std::string FormatReport(const json& report) {
  std::ostringstream out;
  char line[160];
  auto row = [&](const char* label, const json& t, double scale) {
    std::snprintf(line, sizeof line, "%-22s %8.4f %8.4f %8.4f %8.4f\n", label,
                  scale * t.at("1s").get<double>(),
                  scale * t.at("2s").get<double>(),
                  scale * t.at("3s").get<double>(),
                  scale * t.at("avg").get<double>());
    out << line;
  };
  const json& params = report.at("parameters");
  out << "scenarios: " << report.at("num_scenarios").get<int64_t>()
      << "  planning samples: " << report.at("num_planning_samples").get<int64_t>()
      << "\n\n";
  if (report.contains("planning")) {
    const json& p = report["planning"];
    std::snprintf(line, sizeof line, "%-22s %8s %8s %8s %8s\n", "planning", "1s",
                  "2s", "3s", "Avg");
    out << line;
    row("L2 (m)", p["l2"], 1.0);
    row("Collision OBB (%)", p["collision_obb"], 100.0);
    row("Collision grid (%)", p["collision_grid"], 100.0);
    out << "l2 mode " << params["l2_mode"].get<std::string>() << ", grid "
        << params["grid_resolution"].get<double>() << " m, obb/grid diverging "
        << p["obb_grid_diverging_samples"].get<int64_t>() << "\n\n";
  }
  auto num = [](const json& v) {
    char buf[32];
    if (v.is_null()) return std::string("n/a");
    std::snprintf(buf, sizeof buf, "%.4f", v.get<double>());
    return std::string(buf);
  };
  if (report.contains("motion")) {
    const json& m = report["motion"];
    out << "motion   minADE " << num(m["min_ade"]) << "  minFDE "
        << num(m["min_fde"]) << "  MR " << num(m["miss_rate"]) << "  EPA "
        << num(m["epa"]) << "  (miss " << params["miss_threshold"].get<double>()
        << " m, alpha " << params["epa_alpha"].get<double>() << ")\n";
  }
  if (report.contains("tracking")) {
    const json& t = report["tracking"];
    out << "tracking AMOTA " << num(t["amota"]) << "  AMOTP "
        << num(t["amotp"]) << "  Recall " << num(t["recall"]) << "  IDS "
        << t["id_switches"].get<int64_t>() << "  (match "
        << params["match_distance"].get<double>() << " m)\n";
  }
  if (report.contains("reference_scenes")) {
    out << "\nreference scenes      obb(1s 2s 3s)  grid(1s 2s 3s)  diverges\n";
    for (const json& s : report["reference_scenes"]) {
      auto verdicts = [](const json& v) {
        std::string r;
        for (const char* h : kHorizonNames) r += v[h].get<bool>() ? " 1" : " 0";
        return r;
      };
      std::snprintf(line, sizeof line, "%-22s %-14s %-15s %s\n",
                    s["name"].get<std::string>().c_str(),
                    verdicts(s["obb"]).c_str(), verdicts(s["grid"]).c_str(),
                    s["diverges"].get<bool>() ? "yes" : "no");
      out << line;
    }
  }
  return out.str();
}

std::string RunEvaluate(const RunConfig& config,
                        const std::string& scenario_dir,
                        const std::string& plan_dir,
                        const std::string& out_dir) {
  config.Validate();
  const auto paths = ListScenarioFiles(scenario_dir);
  std::vector<Scenario> scenarios;
  for (const std::string& p : paths) scenarios.push_back(LoadScenario(p));

  std::vector<std::pair<std::string, std::string>> runs;  // suffix, dir
  const std::string on = JoinPath(plan_dir, "rescore_on");
  const std::string off = JoinPath(plan_dir, "rescore_off");
  if (fs::is_directory(on) && fs::is_directory(off)) {
    runs = {{"_rescore_on", on}, {"_rescore_off", off}};
  } else {
    runs = {{"", plan_dir}};
  }

  EnsureDir(out_dir);
  std::string text;
  for (const auto& [suffix, dir] : runs) {
    std::vector<PlanFile> plans;
    for (const std::string& p : paths) {
      plans.push_back(LoadPlan(JoinPath(dir, PlanNameFor(p))));
    }
    json report = EvaluatePlans(scenarios, plans, config);
    const std::string body = FormatReport(report);
    WriteFile(JoinPath(out_dir, "report" + suffix + ".json"), report.dump(2) + "\n");
    WriteFile(JoinPath(out_dir, "report" + suffix + ".txt"), body);
    if (!suffix.empty()) text += "== " + suffix.substr(1) + "\n";
    text += body;
    if (!suffix.empty()) text += "\n";
  }
  return text;
}

ClusterCorpus ParseClusterCorpus(std::string_view text) {
  ClusterCorpus corpus;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const json j = json::parse(line);
      if (j.contains("center")) {
        const auto c = j["center"].get<std::vector<double>>();
        if (c.size() != 3) throw std::invalid_argument("center needs 3 values");
        corpus.centers.push_back({c[0], c[1], c[2]});
      } else if (j.contains("polyline")) {
        corpus.polylines.emplace_back(TrajectoryFromJson(j["polyline"]));
      } else {
        throw std::invalid_argument("expected center or polyline");
      }
    } catch (const std::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

ClusterCorpus CorpusFromScenarios(const std::vector<Scenario>& scenarios) {
  ClusterCorpus corpus;
  for (const Scenario& s : scenarios) {
    for (const ScenarioFrame& frame : s.frames) {
      for (const AgentState& a : frame.agents) {
        const AgentState local = ToEgoFrame(a, frame.ego_pose);
        if (local.pose.translation().Norm() > kPerceptionRadius) continue;
        corpus.centers.push_back({local.pose.x(), local.pose.y(), 0.0});
      }
    }
    for (const MapPolyline& line : s.map) corpus.polylines.push_back(line);
  }
  return corpus;
}

ClusterOutput ClusterCorpusAnchors(const ClusterCorpus& corpus,
                                   const RunConfig& config) {
  if (corpus.centers.empty()) throw DataError("corpus has no box centers");
  ClusterOutput out;
  try {
    KMeansResult boxes;
    out.anchors.boxes =
        ClusterAnchorBoxes(corpus.centers, static_cast<size_t>(config.cluster_k),
                           config.seed, &boxes);
    out.box_objective = boxes.objective;
    if (!corpus.polylines.empty()) {
      KMeansResult lines;
      out.anchors.polylines = ClusterPolylines(
          corpus.polylines, static_cast<size_t>(config.cluster_k_polylines),
          config.seed, &lines);
      out.polyline_objective = lines.objective;
    }
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  return out;
}

std::string RunCluster(const RunConfig& config, const std::string& corpus_path,
                       const std::string& scenario_dir,
                       const std::string& out_path) {
  config.Validate();
  ClusterCorpus corpus;
  if (!corpus_path.empty()) {
    try {
      corpus = ParseClusterCorpus(ReadFile(corpus_path));
    } catch (const DataError& e) {
      throw DataError(corpus_path + ": " + e.what());
    }
  } else {
    std::vector<Scenario> scenarios;
    for (const std::string& p : ListScenarioFiles(scenario_dir)) {
      scenarios.push_back(LoadScenario(p));
    }
    corpus = CorpusFromScenarios(scenarios);
  }
  const ClusterOutput result = ClusterCorpusAnchors(corpus, config);
  const fs::path parent = fs::path(out_path).parent_path();
  if (!parent.empty()) EnsureDir(parent.string());
  WriteFile(out_path, AnchorSetToJson(result.anchors).dump() + "\n");

  std::ostringstream msg;
  msg.precision(17);
  msg << "boxes: " << result.anchors.boxes.size() << " anchors from "
      << corpus.centers.size() << " centers, objective " << result.box_objective
      << "\n";
  if (!result.anchors.polylines.empty()) {
    msg << "polylines: " << result.anchors.polylines.size()
        << " anchors from " << corpus.polylines.size()
        << " polylines, objective " << result.polyline_objective << "\n";
  }
  return msg.str();
}

}  // namespace sparseplan
