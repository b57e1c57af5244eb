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

#include "sparseplan/io.h"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <variant>

namespace sparseplan {

using nlohmann::json;

namespace {

constexpr const char* kScenarioFormat = "sparseplan.scenario/1";
constexpr const char* kPlanFormat = "sparseplan.plan/1";

// Named pointers into a struct for flat JSON objects.
using FieldPtr = std::variant<double*, int*>;
using FieldTable = std::vector<std::pair<const char*, FieldPtr>>;

json TableToJson(const FieldTable& fields) {
  json j = json::object();
  for (const auto& [name, ptr] : fields) {
    std::visit([&, n = name](auto* p) { j[n] = *p; }, ptr);
  }
  return j;
}

void TableFromJson(const json& j, const FieldTable& fields,
                   std::string_view what) {
  if (!j.is_object()) {
    throw std::invalid_argument(std::string(what) + ": expected an object");
  }
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& [name, ptr] : fields) {
      if (key != name) continue;
      known = true;
      if (!value.is_number()) {
        throw std::invalid_argument(std::string(what) + ": " + key +
                                    " must be a number");
      }
      std::visit(
          [&](auto* p) {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, int>) {
              if (!value.is_number_integer()) {
                throw std::invalid_argument(std::string(what) + ": " + key +
                                            " must be an integer");
              }
            }
            *p = value.get<T>();
          },
          ptr);
    }
    if (!known) {
      throw std::invalid_argument(std::string(what) + ": unknown key " + key);
    }
  }
}

FieldTable ConfigFields(ScenarioConfig& c) {
  return {{"num_frames", &c.num_frames},
          {"num_agents", &c.num_agents},
          {"spawn_radius", &c.spawn_radius},
          {"min_spawn_distance", &c.min_spawn_distance},
          {"weight_constant_velocity", &c.weight_constant_velocity},
          {"weight_constant_turn_rate", &c.weight_constant_turn_rate},
          {"weight_stationary", &c.weight_stationary},
          {"max_agent_speed", &c.max_agent_speed},
          {"max_agent_turn_rate", &c.max_agent_turn_rate},
          {"ego_min_speed", &c.ego_min_speed},
          {"ego_max_speed", &c.ego_max_speed},
          {"ego_min_turn_radius", &c.ego_min_turn_radius},
          {"ego_max_turn_radius", &c.ego_max_turn_radius},
          {"num_map_polylines", &c.num_map_polylines},
          {"points_per_polyline", &c.points_per_polyline},
          {"command_lateral_threshold", &c.command_lateral_threshold}};
}

FieldTable NoiseFields(PerceptionNoise& n) {
  return {{"sigma_pos", &n.sigma_pos},
          {"sigma_yaw", &n.sigma_yaw},
          {"drop_prob", &n.drop_prob},
          {"fp_rate", &n.fp_rate},
          {"fp_max_confidence", &n.fp_max_confidence},
          {"confidence_scale", &n.confidence_scale}};
}

json Vec2ToJson(Vec2 p) { return json::array({p.x, p.y}); }

Vec2 Vec2FromJson(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json AgentToJson(const AgentState& a) {
  return {{"id", a.id},
          {"x", a.pose.x()},
          {"y", a.pose.y()},
          {"yaw", a.pose.yaw()},
          {"speed", a.speed},
          {"turn_rate", a.turn_rate},
          {"width", a.width},
          {"length", a.length},
          {"behavior", BehaviorName(a.behavior)}};
}

AgentState AgentFromJson(const json& j) {
  AgentState a;
  a.id = j.at("id").get<int64_t>();
  a.pose = Pose2(j.at("x").get<double>(), j.at("y").get<double>(),
                 j.at("yaw").get<double>());
  a.speed = j.at("speed").get<double>();
  a.turn_rate = j.at("turn_rate").get<double>();
  a.width = j.at("width").get<double>();
  a.length = j.at("length").get<double>();
  a.behavior = ParseBehavior(j.at("behavior").get<std::string>());
  return a;
}

// Splits into lines and runs `fn(line_number, parsed)` for each non-empty
// line, re-throwing any failure as DataError with the line number.
template <typename Fn>
void ForEachJsonLine(std::string_view text, Fn fn) {
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
      fn(line_no, json::parse(line));
    } catch (const DataError&) {
      throw;
    } catch (const std::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

json ScenarioConfigToJson(const ScenarioConfig& c) {
  ScenarioConfig copy = c;
  return TableToJson(ConfigFields(copy));
}

ScenarioConfig ScenarioConfigFromJson(const json& j) {
  ScenarioConfig c;
  TableFromJson(j, ConfigFields(c), "scenario config");
  return c;
}

json PerceptionNoiseToJson(const PerceptionNoise& n) {
  PerceptionNoise copy = n;
  return TableToJson(NoiseFields(copy));
}

PerceptionNoise PerceptionNoiseFromJson(const json& j) {
  PerceptionNoise n;
  TableFromJson(j, NoiseFields(n), "noise");
  return n;
}

json TrajectoryToJson(const Trajectory& t) {
  json out = json::array();
  for (const Vec2& p : t) out.push_back(Vec2ToJson(p));
  return out;
}

Trajectory TrajectoryFromJson(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a point list");
  Trajectory t;
  t.reserve(j.size());
  for (const json& p : j) t.push_back(Vec2FromJson(p));
  return t;
}

std::string ScenarioToJsonl(const Scenario& s) {
  json map = json::array();
  for (const MapPolyline& line : s.map) map.push_back(TrajectoryToJson(line.points()));
  json header = {{"type", "header"},
                 {"format", kScenarioFormat},
                 {"seed", s.seed},
                 {"dt", s.dt},
                 {"num_frames", s.frames.size()},
                 {"config", ScenarioConfigToJson(s.config)},
                 {"map", std::move(map)}};
  std::string out = header.dump() + "\n";
  for (const ScenarioFrame& f : s.frames) {
    json agents = json::array();
    for (const AgentState& a : f.agents) agents.push_back(AgentToJson(a));
    json line = {
        {"type", "frame"},
        {"index", f.index},
        {"command", CommandName(f.command)},
        {"ego",
         {{"x", f.ego_pose.x()},
          {"y", f.ego_pose.y()},
          {"yaw", f.ego_pose.yaw()},
          {"velocity", f.ego_status.velocity},
          {"acceleration", f.ego_status.acceleration},
          {"angular_velocity", f.ego_status.angular_velocity},
          {"steering_angle", f.ego_status.steering_angle}}},
        {"agents", std::move(agents)}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

Scenario ScenarioFromJsonl(std::string_view text) {
  Scenario s;
  bool have_header = false;
  size_t expected_frames = 0;
  ForEachJsonLine(text, [&](size_t line_no, const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (!have_header) {
      if (type != "header") throw std::invalid_argument("expected header");
      if (j.at("format").get<std::string>() != kScenarioFormat) {
        throw std::invalid_argument("unsupported format");
      }
      s.seed = j.at("seed").get<uint64_t>();
      s.dt = j.at("dt").get<double>();
      expected_frames = j.at("num_frames").get<size_t>();
      s.config = ScenarioConfigFromJson(j.at("config"));
      for (const json& line : j.at("map")) {
        s.map.emplace_back(TrajectoryFromJson(line));
      }
      have_header = true;
      return;
    }
    if (type != "frame") throw std::invalid_argument("expected frame");
    ScenarioFrame f;
    f.index = j.at("index").get<int64_t>();
    if (f.index != static_cast<int64_t>(s.frames.size())) {
      throw std::invalid_argument("frame index out of order");
    }
    f.command = ParseCommand(j.at("command").get<std::string>());
    const json& ego = j.at("ego");
    f.ego_pose = Pose2(ego.at("x").get<double>(), ego.at("y").get<double>(),
                       ego.at("yaw").get<double>());
    f.ego_status = {ego.at("velocity").get<double>(),
                    ego.at("acceleration").get<double>(),
                    ego.at("angular_velocity").get<double>(),
                    ego.at("steering_angle").get<double>()};
    for (const json& a : j.at("agents")) f.agents.push_back(AgentFromJson(a));
    s.frames.push_back(std::move(f));
    (void)line_no;
  });
  if (!have_header) throw DataError("line 1: missing header");
  if (s.frames.size() != expected_frames) {
    throw DataError("header announces " + std::to_string(expected_frames) +
                    " frames, found " + std::to_string(s.frames.size()));
  }
  return s;
}

std::string PlanFileToJsonl(const PlanFile& p) {
  json header = {{"type", "plan_header"},
                 {"format", kPlanFormat},
                 {"scenario_seed", p.scenario_seed},
                 {"rescore", p.rescore},
                 {"planner", p.planner},
                 {"parameters", p.parameters}};
  std::string out = header.dump() + "\n";
  for (const PlanRecord& r : p.records) {
    json tracks = json::array();
    for (const PlannedTrack& t : r.tracks) {
      json modes = json::array();
      for (const Trajectory& m : t.forecast.modes) modes.push_back(TrajectoryToJson(m));
      tracks.push_back({{"id", t.id},
                        {"confidence", t.confidence},
                        {"x", t.state.pose.x()},
                        {"y", t.state.pose.y()},
                        {"yaw", t.state.pose.yaw()},
                        {"width", t.state.width},
                        {"length", t.state.length},
                        {"vx", t.velocity.x},
                        {"vy", t.velocity.y},
                        {"modes", std::move(modes)},
                        {"mode_scores", t.forecast.scores}});
    }
    const SelectionDiagnostics& d = r.diagnostics;
    json line = {{"type", "plan"},
                 {"frame", r.frame},
                 {"command", CommandName(r.command)},
                 {"mode_index", r.mode_index},
                 {"trajectory", TrajectoryToJson(r.trajectory)},
                 {"scores", d.original_scores},
                 {"rescored_scores", d.rescored_scores},
                 {"collided", d.collided},
                 {"all_colliding", d.all_colliding},
                 {"rescore", d.rescore_enabled ? "on" : "off"},
                 {"tracks", std::move(tracks)}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

PlanFile PlanFileFromJsonl(std::string_view text) {
  PlanFile p;
  bool have_header = false;
  ForEachJsonLine(text, [&](size_t, const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (!have_header) {
      if (type != "plan_header") throw std::invalid_argument("expected header");
      if (j.at("format").get<std::string>() != kPlanFormat) {
        throw std::invalid_argument("unsupported format");
      }
      p.scenario_seed = j.at("scenario_seed").get<uint64_t>();
      p.rescore = j.at("rescore").get<bool>();
      p.planner = j.at("planner").get<std::string>();
      p.parameters = j.at("parameters");
      have_header = true;
      return;
    }
    if (type != "plan") throw std::invalid_argument("expected plan");
    PlanRecord r;
    r.frame = j.at("frame").get<int64_t>();
    r.command = ParseCommand(j.at("command").get<std::string>());
    r.mode_index = j.at("mode_index").get<size_t>();
    r.trajectory = TrajectoryFromJson(j.at("trajectory"));
    r.diagnostics.original_scores = j.at("scores").get<std::vector<double>>();
    r.diagnostics.rescored_scores =
        j.at("rescored_scores").get<std::vector<double>>();
    r.diagnostics.collided = j.at("collided").get<std::vector<bool>>();
    r.diagnostics.all_colliding = j.at("all_colliding").get<bool>();
    r.diagnostics.rescore_enabled = j.at("rescore").get<std::string>() == "on";
    for (const json& t : j.at("tracks")) {
      PlannedTrack track;
      track.id = t.at("id").get<TrackId>();
      track.confidence = t.at("confidence").get<double>();
      track.state.id = track.id;
      track.state.pose = Pose2(t.at("x").get<double>(), t.at("y").get<double>(),
                               t.at("yaw").get<double>());
      track.state.width = t.at("width").get<double>();
      track.state.length = t.at("length").get<double>();
      track.velocity = {t.at("vx").get<double>(), t.at("vy").get<double>()};
      for (const json& m : t.at("modes")) {
        track.forecast.modes.push_back(TrajectoryFromJson(m));
      }
      track.forecast.scores = t.at("mode_scores").get<std::vector<double>>();
      if (track.forecast.scores.size() != track.forecast.modes.size()) {
        throw std::invalid_argument("mode_scores and modes differ in count");
      }
      r.tracks.push_back(std::move(track));
    }
    p.records.push_back(std::move(r));
  });
  if (!have_header) throw DataError("line 1: missing header");
  return p;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw DataError("read failed: " + path);
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("write failed: " + path);
}

std::string Sha256Hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace sparseplan
