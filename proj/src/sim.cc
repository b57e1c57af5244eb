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

#include "sparseplan/sim.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace sparseplan {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kStraightTurnRate = 1e-9;

// Unicycle arc: exact for constant speed and turn rate.
Pose2 ArcStep(const Pose2& p, double speed, double turn_rate, double dt) {
  const double yaw = p.yaw();
  if (std::abs(turn_rate) < kStraightTurnRate) {
    return {p.x() + speed * std::cos(yaw) * dt,
            p.y() + speed * std::sin(yaw) * dt, yaw};
  }
  const double r = speed / turn_rate;
  const double next_yaw = yaw + turn_rate * dt;
  return {p.x() + r * (std::sin(next_yaw) - std::sin(yaw)),
          p.y() - r * (std::cos(next_yaw) - std::cos(yaw)), next_yaw};
}

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

void Require(bool ok, const char* what, const char* prefix) {
  if (!ok) throw std::invalid_argument(std::string(prefix) + what);
}

Command CommandFromFuture(const Pose2& now, const Pose2& later,
                          double threshold) {
  const Vec2 rel = now.Inverse().TransformPoint(later.translation());
  if (rel.y > threshold) return Command::kTurnLeft;
  if (rel.y < -threshold) return Command::kTurnRight;
  return Command::kGoStraight;
}

}  // namespace

std::string_view BehaviorName(Behavior b) {
  switch (b) {
    case Behavior::kConstantVelocity:
      return "constant_velocity";
    case Behavior::kConstantTurnRate:
      return "constant_turn_rate";
    case Behavior::kStationary:
      return "stationary";
  }
  return "unknown";
}

Behavior ParseBehavior(std::string_view name) {
  for (Behavior b : {Behavior::kConstantVelocity, Behavior::kConstantTurnRate,
                     Behavior::kStationary}) {
    if (BehaviorName(b) == name) return b;
  }
  throw std::invalid_argument("unknown behavior: " + std::string(name));
}

Vec2 AgentState::velocity() const {
  if (behavior == Behavior::kStationary) return {};
  return {speed * std::cos(pose.yaw()), speed * std::sin(pose.yaw())};
}

AgentState StepAgent(const AgentState& s, double dt) {
  AgentState next = s;
  switch (s.behavior) {
    case Behavior::kStationary:
      break;
    case Behavior::kConstantVelocity:
      next.pose = ArcStep(s.pose, s.speed, 0.0, dt);
      break;
    case Behavior::kConstantTurnRate:
      next.pose = ArcStep(s.pose, s.speed, s.turn_rate, dt);
      break;
  }
  return next;
}

Rollout RolloutAgent(const AgentState& state, size_t steps, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  Rollout out;
  out.points.reserve(steps);
  out.yaws.reserve(steps);
  AgentState s = state;
  for (size_t t = 0; t < steps; ++t) {
    s = StepAgent(s, dt);
    out.points.push_back(s.pose.translation());
    out.yaws.push_back(s.pose.yaw());
  }
  return out;
}

void ScenarioConfig::Validate() const {
  constexpr const char* kPrefix = "invalid config: ";
  Require(num_frames >= static_cast<int>(kPlanSteps) + 1,
          "num_frames must exceed the planning horizon", kPrefix);
  Require(num_agents >= 0, "num_agents must be >= 0", kPrefix);
  Require(spawn_radius > 0.0 && spawn_radius <= kPerceptionRadius,
          "spawn_radius must be in (0, 55]", kPrefix);
  Require(min_spawn_distance >= 0.0 && min_spawn_distance < spawn_radius,
          "min_spawn_distance must be in [0, spawn_radius)", kPrefix);
  Require(weight_constant_velocity >= 0.0 && weight_constant_turn_rate >= 0.0 &&
              weight_stationary >= 0.0,
          "behavior weights must be >= 0", kPrefix);
  Require(weight_constant_velocity + weight_constant_turn_rate +
                  weight_stationary > 0.0,
          "behavior weights must not all be 0", kPrefix);
  Require(max_agent_speed >= 0.0, "max_agent_speed must be >= 0", kPrefix);
  Require(max_agent_turn_rate >= 0.0, "max_agent_turn_rate must be >= 0",
          kPrefix);
  Require(ego_min_speed >= 0.0 && ego_min_speed <= ego_max_speed,
          "ego speed range is empty", kPrefix);
  Require(ego_min_turn_radius > 0.0 &&
              ego_min_turn_radius <= ego_max_turn_radius,
          "ego turn radius range is empty", kPrefix);
  Require(num_map_polylines >= 0, "num_map_polylines must be >= 0", kPrefix);
  Require(points_per_polyline >= 2, "points_per_polyline must be >= 2",
          kPrefix);
  Require(command_lateral_threshold > 0.0,
          "command_lateral_threshold must be > 0", kPrefix);
}

Scenario GenerateScenario(uint64_t seed, const ScenarioConfig& config) {
  config.Validate();
  std::mt19937_64 rng(seed);
  Scenario s;
  s.seed = seed;
  s.config = config;
  s.dt = kFrameDt;

  // Ego: constant speed, piecewise constant turn rate. Simulated past the
  // last frame so every frame has a command.
  const double ego_speed = Uniform(rng, config.ego_min_speed,
                                   config.ego_max_speed);
  const size_t total = static_cast<size_t>(config.num_frames) + kPlanSteps;
  std::vector<double> turn_rates;
  turn_rates.reserve(total);
  std::uniform_int_distribution<int> segment_len(4, 10);
  std::uniform_int_distribution<int> turn_kind(0, 3);
  while (turn_rates.size() < total) {
    const int kind = turn_kind(rng);  // 0, 1: straight; 2: left; 3: right
    const double radius = Uniform(rng, config.ego_min_turn_radius,
                                  config.ego_max_turn_radius);
    double rate = 0.0;
    if (kind == 2) rate = ego_speed / radius;
    if (kind == 3) rate = -ego_speed / radius;
    const int len = segment_len(rng);
    for (int i = 0; i < len && turn_rates.size() < total; ++i) {
      turn_rates.push_back(rate);
    }
  }
  std::vector<Pose2> ego_poses;
  ego_poses.reserve(total + 1);
  ego_poses.push_back(Pose2::Identity());
  for (size_t f = 0; f < total; ++f) {
    ego_poses.push_back(ArcStep(ego_poses.back(), ego_speed, turn_rates[f],
                                kFrameDt));
  }

  // Agents.
  std::discrete_distribution<int> behavior_pick(
      {config.weight_constant_velocity, config.weight_constant_turn_rate,
       config.weight_stationary});
  std::vector<AgentState> agents;
  const double r_min2 = config.min_spawn_distance * config.min_spawn_distance;
  const double r_max2 = config.spawn_radius * config.spawn_radius;
  for (int i = 0; i < config.num_agents; ++i) {
    AgentState a;
    a.id = i;
    const double radius = std::sqrt(Uniform(rng, r_min2, r_max2));
    const double bearing = Uniform(rng, -kPi, kPi);
    a.pose = Pose2(radius * std::cos(bearing), radius * std::sin(bearing),
                   Uniform(rng, -kPi, kPi));
    a.behavior = static_cast<Behavior>(behavior_pick(rng));
    a.speed = a.behavior == Behavior::kStationary
                  ? 0.0
                  : Uniform(rng, 0.0, config.max_agent_speed);
    a.turn_rate = a.behavior == Behavior::kConstantTurnRate
                      ? Uniform(rng, -config.max_agent_turn_rate,
                                config.max_agent_turn_rate)
                      : 0.0;
    a.length = Uniform(rng, 3.5, 5.0);
    a.width = Uniform(rng, 1.6, 2.1);
    agents.push_back(a);
  }

  for (int f = 0; f < config.num_frames; ++f) {
    ScenarioFrame frame;
    frame.index = f;
    frame.ego_pose = ego_poses[f];
    const double rate = turn_rates[f];
    frame.ego_status = {
        .velocity = ego_speed,
        .acceleration = 0.0,
        .angular_velocity = rate,
        .steering_angle =
            ego_speed > 0.0 ? std::atan(kEgoWheelbase * rate / ego_speed) : 0.0};
    frame.agents = agents;
    frame.command = CommandFromFuture(ego_poses[f], ego_poses[f + kPlanSteps],
                                      config.command_lateral_threshold);
    s.frames.push_back(std::move(frame));
    for (AgentState& a : agents) a = StepAgent(a, kFrameDt);
  }

  // Map: near-straight lines inside the 60 m x 30 m window.
  const double half_long = 0.5 * kMapLongitudinalRange;
  const double half_lat = 0.5 * kMapLateralRange;
  constexpr double kMaxTilt = 0.1;
  const double max_offset = half_lat - half_long * std::tan(kMaxTilt);
  for (int i = 0; i < config.num_map_polylines; ++i) {
    const double offset = Uniform(rng, -max_offset, max_offset);
    const double tilt = Uniform(rng, -kMaxTilt, kMaxTilt);
    std::vector<Vec2> pts;
    const int n = config.points_per_polyline;
    for (int k = 0; k < n; ++k) {
      const double x = -half_long + kMapLongitudinalRange * k / (n - 1);
      pts.push_back({x, offset + std::tan(tilt) * x});
    }
    s.map.emplace_back(std::move(pts));
  }
  return s;
}

Pose2 RelativeEgoPose(const Scenario& s, size_t reference, size_t index) {
  return Compose(s.frames.at(reference).ego_pose.Inverse(),
                 s.frames.at(index).ego_pose);
}

AgentState ToEgoFrame(const AgentState& world, const Pose2& ego_pose) {
  AgentState local = world;
  local.pose = Compose(ego_pose.Inverse(), world.pose);
  return local;
}

Trajectory EgoFuture(const Scenario& s, size_t frame, size_t steps) {
  Trajectory out;
  const Pose2 inv = s.frames.at(frame).ego_pose.Inverse();
  for (size_t k = 1; k <= steps && frame + k < s.frames.size(); ++k) {
    out.push_back(inv.TransformPoint(s.frames[frame + k].ego_pose.translation()));
  }
  return out;
}

TrajectorySet BaselineForecast(BaselineKind kind, const AnchorBox& current,
                               size_t steps, double dt) {
  Trajectory mode;
  mode.reserve(steps);
  for (size_t t = 1; t <= steps; ++t) {
    if (kind == BaselineKind::kConstantPosition) {
      mode.push_back(current.center2());
    } else {
      const double time = static_cast<double>(t) * dt;
      mode.push_back({current.x + current.vx * time,
                      current.y + current.vy * time});
    }
  }
  return {{std::move(mode)}, {1.0}};
}

void PerceptionNoise::Validate() const {
  constexpr const char* kPrefix = "invalid noise: ";
  Require(sigma_pos >= 0.0 && sigma_yaw >= 0.0, "sigmas must be >= 0",
          kPrefix);
  Require(drop_prob >= 0.0 && drop_prob <= 1.0, "drop_prob must be in [0, 1]",
          kPrefix);
  Require(fp_rate >= 0.0 && fp_rate <= 1.0, "fp_rate must be in [0, 1]",
          kPrefix);
  Require(fp_max_confidence > 0.0 && fp_max_confidence <= 1.0,
          "fp_max_confidence must be in (0, 1]", kPrefix);
  Require(confidence_scale > 0.0, "confidence_scale must be > 0", kPrefix);
}

std::vector<std::vector<Detection>> PerturbPerception(
    const Scenario& scenario, const PerceptionNoise& noise, uint64_t seed) {
  noise.Validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  std::bernoulli_distribution drop(noise.drop_prob);
  std::bernoulli_distribution spawn_fp(noise.fp_rate);

  std::vector<std::vector<Detection>> out;
  out.reserve(scenario.frames.size());
  int64_t next_fp_slot = -1;
  for (const ScenarioFrame& frame : scenario.frames) {
    std::vector<Detection> dets;
    for (const AgentState& world : frame.agents) {
      const AgentState a = ToEgoFrame(world, frame.ego_pose);
      if (a.pose.translation().Norm() > kPerceptionRadius) continue;
      // Draws happen in a fixed order so that changing one probability
      // leaves the other streams aligned.
      const bool dropped = drop(rng);
      const Vec2 err{noise.sigma_pos * unit_normal(rng),
                     noise.sigma_pos * unit_normal(rng)};
      const double yaw_err = noise.sigma_yaw * unit_normal(rng);
      if (dropped) continue;

      BoxState box;
      box.center = {a.pose.x() + err.x, a.pose.y() + err.y, 0.0};
      box.dims = {.width = a.width, .height = 1.5, .length = a.length};
      box.yaw = a.pose.yaw() + yaw_err;
      const Vec2 v = a.velocity();
      box.velocity = {v.x, v.y, 0.0};
      const double e2 = err.Dot(err);
      const double conf =
          std::exp(-e2 / (2.0 * noise.confidence_scale * noise.confidence_scale));
      dets.push_back({Instance(EncodeAnchor(box), conf), world.id, world.id});
    }

    const size_t slots = std::max<size_t>(frame.agents.size(), 1);
    for (size_t k = 0; k < slots; ++k) {
      if (!spawn_fp(rng)) continue;
      const double radius = kPerceptionRadius * std::sqrt(Uniform(rng, 0.0, 1.0));
      const double bearing = Uniform(rng, -kPi, kPi);
      BoxState box;
      box.center = {radius * std::cos(bearing), radius * std::sin(bearing), 0.0};
      box.dims = {.width = 1.8, .height = 1.5, .length = 4.5};
      box.yaw = Uniform(rng, -kPi, kPi);
      const double conf = Uniform(rng, 0.0, noise.fp_max_confidence);
      dets.push_back({Instance(EncodeAnchor(box), conf), next_fp_slot--,
                      std::nullopt});
    }
    out.push_back(std::move(dets));
  }
  return out;
}

TrajectorySet GeneratePlanProposals(const Pose2& ego, double speed,
                                    Command cmd, size_t num_modes,
                                    size_t steps, double dt) {
  if (num_modes == 0) throw std::invalid_argument("num_modes must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  double nominal = 0.0;
  double spread = kPi / 6.0;
  if (cmd == Command::kTurnLeft) {
    nominal = kPi / 2.0;
    spread = kPi / 4.0;
  } else if (cmd == Command::kTurnRight) {
    nominal = -kPi / 2.0;
    spread = kPi / 4.0;
  }
  constexpr double kPriorSigma = kPi / 8.0;
  const double horizon = static_cast<double>(steps) * dt;

  TrajectorySet out;
  double total = 0.0;
  for (size_t k = 0; k < num_modes; ++k) {
    const double offset =
        num_modes == 1
            ? 0.0
            : spread * (-1.0 + 2.0 * static_cast<double>(k) /
                                   static_cast<double>(num_modes - 1));
    AgentState arc;
    arc.pose = ego;
    arc.speed = std::max(speed, 0.0);
    arc.turn_rate = (nominal + offset) / horizon;
    arc.behavior = Behavior::kConstantTurnRate;
    out.modes.push_back(RolloutAgent(arc, steps, dt).points);
    const double w =
        std::exp(-offset * offset / (2.0 * kPriorSigma * kPriorSigma));
    out.scores.push_back(w);
    total += w;
  }
  for (double& w : out.scores) w /= total;
  return out;
}

PlanProposalSet GenerateProposalSet(const Pose2& ego, double speed,
                                    size_t num_modes, size_t steps,
                                    double dt) {
  PlanProposalSet set;
  for (Command cmd : kAllCommands) {
    set.per_command[static_cast<size_t>(cmd)] =
        GeneratePlanProposals(ego, speed, cmd, num_modes, steps, dt);
  }
  return set;
}

}  // namespace sparseplan
