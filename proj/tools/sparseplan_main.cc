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

// sparseplan generate | plan | evaluate | cluster
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sparseplan/app.h"

namespace {

using sparseplan::RunConfig;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Flags that mirror RunConfig fields. Unset flags leave the config alone.
struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<int> num_scenarios, num_frames, num_agents;
  std::optional<double> sigma_pos, sigma_yaw, drop_prob, fp_rate;
  std::optional<std::string> planner, l2_mode;
  std::optional<int> plan_modes, plan_steps, motion_steps, top_k_modes,
      memory_frames;
  std::optional<double> track_threshold, miss_threshold, epa_alpha,
      epa_threshold, grid_resolution, match_distance;
  std::optional<int> k, k_polylines;
  bool no_rescore = false;
  bool reference_scenes = false;

  void Register(CLI::App* app) {
    app->add_option("--seed", seed, "master seed");
    app->add_option("--num-scenarios,-n", num_scenarios);
    app->add_option("--num-frames", num_frames);
    app->add_option("--num-agents", num_agents);
    app->add_option("--sigma-pos", sigma_pos, "detection position noise (m)");
    app->add_option("--sigma-yaw", sigma_yaw, "detection yaw noise (rad)");
    app->add_option("--drop-prob", drop_prob);
    app->add_option("--fp-rate", fp_rate);
    app->add_option("--planner", planner, "fan or gt");
    app->add_option("--plan-modes", plan_modes);
    app->add_option("--plan-steps", plan_steps);
    app->add_option("--motion-steps", motion_steps);
    app->add_option("--top-k-modes", top_k_modes);
    app->add_option("--memory-frames", memory_frames);
    app->add_option("--track-threshold", track_threshold);
    app->add_option("--miss-threshold", miss_threshold);
    app->add_option("--epa-alpha", epa_alpha);
    app->add_option("--epa-threshold", epa_threshold);
    app->add_option("--grid-resolution", grid_resolution);
    app->add_option("--match-dist", match_distance);
    app->add_option("--l2-mode", l2_mode, "at_horizon or cumulative_mean");
    app->add_option("--k", k, "box anchors");
    app->add_option("--k-polylines", k_polylines, "polyline anchors");
    app->add_flag("--no-rescore", no_rescore, "disable collision-aware rescore");
    app->add_flag("--reference-scenes", reference_scenes,
                  "append the OBB vs grid reference scenes to the report");
  }

  nlohmann::json ToJson() const {
    nlohmann::json j = nlohmann::json::object();
    auto put = [&](const char* key, const auto& v) {
      if (v) j[key] = *v;
    };
    put("seed", seed);
    put("num_scenarios", num_scenarios);
    put("planner", planner);
    put("plan_modes", plan_modes);
    put("plan_steps", plan_steps);
    put("motion_steps", motion_steps);
    put("top_k_modes", top_k_modes);
    put("memory_frames", memory_frames);
    put("track_threshold", track_threshold);
    put("miss_threshold", miss_threshold);
    put("epa_alpha", epa_alpha);
    put("epa_threshold", epa_threshold);
    put("grid_resolution", grid_resolution);
    put("match_distance", match_distance);
    put("l2_mode", l2_mode);
    put("cluster_k", k);
    put("cluster_k_polylines", k_polylines);
    nlohmann::json scenario = nlohmann::json::object();
    if (num_frames) scenario["num_frames"] = *num_frames;
    if (num_agents) scenario["num_agents"] = *num_agents;
    if (!scenario.empty()) j["scenario"] = scenario;
    nlohmann::json noise = nlohmann::json::object();
    if (sigma_pos) noise["sigma_pos"] = *sigma_pos;
    if (sigma_yaw) noise["sigma_yaw"] = *sigma_yaw;
    if (drop_prob) noise["drop_prob"] = *drop_prob;
    if (fp_rate) noise["fp_rate"] = *fp_rate;
    if (!noise.empty()) j["noise"] = noise;
    if (no_rescore) j["rescore"] = false;
    if (reference_scenes) j["reference_scenes"] = true;
    return j;
  }
};

RunConfig LoadConfig(const std::string& path, const Overrides& flags) {
  RunConfig config;
  if (!path.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(sparseplan::ReadFile(path));
    } catch (const nlohmann::json::exception& e) {
      throw sparseplan::UsageError(path + ": " + e.what());
    }
    config = sparseplan::RunConfigFromJson(j, config);
  }
  return sparseplan::RunConfigFromJson(flags.ToJson(), config);
}

std::string DefaultOutDir() {
  const char* env = std::getenv("SPARSEPLAN_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse instance planning toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, scenario_dir, plan_dir, corpus_path;
  bool ablation = false;
  Overrides flags;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run config");
    cmd->add_option("--out,-o", out_dir,
                    "output directory (default $SPARSEPLAN_OUT_DIR or ./out)");
    flags.Register(cmd);
  };

  CLI::App* generate = app.add_subcommand("generate", "write scenario files");
  add_common(generate);

  CLI::App* plan = app.add_subcommand("plan", "plan every scenario frame");
  add_common(plan);
  plan->add_option("--scenarios,-s", scenario_dir, "scenario directory")
      ->required();
  plan->add_flag("--ablation", ablation,
                 "write rescore_on/ and rescore_off/ plan sets");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score plans");
  add_common(evaluate);
  evaluate->add_option("--scenarios,-s", scenario_dir)->required();
  evaluate->add_option("--plans,-p", plan_dir)->required();

  CLI::App* cluster = app.add_subcommand("cluster", "K-Means anchors");
  add_common(cluster);
  auto* corpus_opt = cluster->add_option("--corpus", corpus_path,
                                         "JSONL of centers / polylines");
  auto* from_opt =
      cluster->add_option("--from-scenarios", scenario_dir, "scenario directory");
  corpus_opt->excludes(from_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  if (cluster->parsed() && corpus_opt->count() + from_opt->count() != 1) {
    std::cerr << "cluster: pass --corpus or --from-scenarios\n";
    return kExitUsage;
  }
  if (out_dir.empty()) out_dir = DefaultOutDir();

  try {
    const RunConfig config = LoadConfig(config_path, flags);
    if (generate->parsed()) {
      std::cout << sparseplan::RunGenerate(config, out_dir).dump(2) << "\n";
    } else if (plan->parsed()) {
      std::cout << sparseplan::RunPlan(config, scenario_dir, out_dir, ablation)
                       .dump(2)
                << "\n";
    } else if (evaluate->parsed()) {
      std::cout << sparseplan::RunEvaluate(config, scenario_dir, plan_dir,
                                           out_dir);
    } else if (cluster->parsed()) {
      const std::string out_path =
          (std::filesystem::path(out_dir) / "anchors.json").string();
      std::cout << sparseplan::RunCluster(config, corpus_path, scenario_dir,
                                          out_path);
    }
  } catch (const sparseplan::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
