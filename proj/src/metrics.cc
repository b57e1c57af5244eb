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

#include "sparseplan/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace sparseplan {
namespace {

constexpr size_t kMinPlanSteps = kHorizonSteps.back() + 1;

void CheckNonEmpty(std::span<const PlanningEvalSample> samples) {
  if (samples.empty()) throw std::invalid_argument("empty samples");
}

void CheckPlanHorizon(const PlanningEvalSample& s) {
  if (s.plan.size() < kMinPlanSteps) {
    throw std::invalid_argument("horizon mismatch");
  }
}

HorizonTable FinishTable(const std::array<double, 3>& sums, size_t n) {
  HorizonTable t;
  for (size_t h = 0; h < 3; ++h) t.at[h] = sums[h] / static_cast<double>(n);
  t.avg = (t.at[0] + t.at[1] + t.at[2]) / 3.0;
  return t;
}

template <typename VerdictFn>
HorizonTable CollisionRate(std::span<const PlanningEvalSample> samples,
                           VerdictFn verdicts) {
  CheckNonEmpty(samples);
  std::array<double, 3> counts{};
  for (const PlanningEvalSample& s : samples) {
    const std::array<bool, 3> v = verdicts(s);
    for (size_t h = 0; h < 3; ++h) counts[h] += v[h] ? 1.0 : 0.0;
  }
  return FinishTable(counts, samples.size());
}

const std::vector<OBB2>& ObstaclesAt(const PlanningEvalSample& s, size_t t) {
  static const std::vector<OBB2> kNone;
  return t < s.agents.size() ? s.agents[t] : kNone;
}

// Integer cell indices whose centers fall inside [lo, hi].
std::pair<int64_t, int64_t> CellRange(double lo, double hi, double res) {
  return {static_cast<int64_t>(std::ceil(lo / res - 0.5)),
          static_cast<int64_t>(std::floor(hi / res - 0.5))};
}

}  // namespace

HorizonTable PlanningL2(std::span<const PlanningEvalSample> samples,
                        L2Mode mode) {
  CheckNonEmpty(samples);
  std::array<double, 3> sums{};
  for (const PlanningEvalSample& s : samples) {
    CheckPlanHorizon(s);
    if (s.gt.size() != s.plan.size()) {
      throw std::invalid_argument("horizon mismatch");
    }
    for (size_t h = 0; h < 3; ++h) {
      const size_t step = kHorizonSteps[h];
      if (mode == L2Mode::kAtHorizon) {
        sums[h] += Distance(s.plan[step], s.gt[step]);
      } else {
        double acc = 0.0;
        for (size_t t = 0; t <= step; ++t) acc += Distance(s.plan[t], s.gt[t]);
        sums[h] += acc / static_cast<double>(step + 1);
      }
    }
  }
  return FinishTable(sums, samples.size());
}

std::array<bool, 3> ObbCollisions(const PlanningEvalSample& s) {
  CheckPlanHorizon(s);
  const std::vector<double> yaws = EstimateYaws(s.plan, s.gt_yaw0);
  std::array<bool, 3> out{};
  for (size_t h = 0; h < 3; ++h) {
    const size_t t = kHorizonSteps[h];
    const OBB2 ego =
        OBB2::FromDims(s.plan[t], s.ego.length, s.ego.width, yaws[t]);
    for (const OBB2& obstacle : ObstaclesAt(s, t)) {
      if (ObbOverlap(ego, obstacle)) {
        out[h] = true;
        break;
      }
    }
  }
  return out;
}

std::array<bool, 3> GridCollisions(const PlanningEvalSample& s,
                                   double resolution) {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("grid resolution must be positive");
  }
  CheckPlanHorizon(s);
  const double half_cell = 0.5 * resolution;
  std::array<bool, 3> out{};
  for (size_t h = 0; h < 3; ++h) {
    const size_t t = kHorizonSteps[h];
    const auto& obstacles = ObstaclesAt(s, t);
    if (obstacles.empty()) continue;
    std::vector<OBB2> grown;
    grown.reserve(obstacles.size());
    for (const OBB2& o : obstacles) grown.push_back(o.Dilated(half_cell));

    const OBB2 ego = OBB2::FromDims(s.plan[t], s.ego.length, s.ego.width,
                                    s.gt_yaw0)
                         .Dilated(half_cell);
    double min_x = std::numeric_limits<double>::infinity();
    double max_x = -min_x, min_y = min_x, max_y = -min_x;
    for (const Vec2& c : ego.Corners()) {
      min_x = std::min(min_x, c.x);
      max_x = std::max(max_x, c.x);
      min_y = std::min(min_y, c.y);
      max_y = std::max(max_y, c.y);
    }
    const auto [i0, i1] = CellRange(min_x, max_x, resolution);
    const auto [j0, j1] = CellRange(min_y, max_y, resolution);
    for (int64_t i = i0; i <= i1 && !out[h]; ++i) {
      for (int64_t j = j0; j <= j1 && !out[h]; ++j) {
        const Vec2 center{(static_cast<double>(i) + 0.5) * resolution,
                          (static_cast<double>(j) + 0.5) * resolution};
        if (!ego.Contains(center)) continue;
        for (const OBB2& o : grown) {
          if (o.Contains(center)) {
            out[h] = true;
            break;
          }
        }
      }
    }
  }
  return out;
}

HorizonTable CollisionRateObb(std::span<const PlanningEvalSample> samples) {
  return CollisionRate(samples, [](const PlanningEvalSample& s) {
    return ObbCollisions(s);
  });
}

HorizonTable CollisionRateGrid(std::span<const PlanningEvalSample> samples,
                               double resolution) {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("grid resolution must be positive");
  }
  return CollisionRate(samples, [resolution](const PlanningEvalSample& s) {
    return GridCollisions(s, resolution);
  });
}

PlanningEvalSample SubCellObstacleScene() {
  PlanningEvalSample s;
  s.ego = {.length = 4.0, .width = 2.0};
  s.gt_yaw0 = 0.0;
  // 1 m per 0.5 s step, offset 5 cm left so the ego edge sits at y = 1.05.
  for (size_t t = 0; t < kPlanSteps; ++t) {
    s.plan.push_back({static_cast<double>(t + 1), 0.05});
  }
  s.gt = s.plan;
  // 0.3 m square, near edge at y = 1.45: 0.4 m clearance.
  const OBB2 obstacle = OBB2::FromDims({6.0, 1.6}, 0.3, 0.3, 0.0);
  s.agents.assign(kPlanSteps, {obstacle});
  return s;
}

PlanningEvalSample HeadingChangeScene() {
  PlanningEvalSample s;
  s.ego = {.length = 4.0, .width = 2.0};
  s.gt_yaw0 = 0.0;
  // Quarter circle of radius 10 m to the left, ending at (10, 10) heading
  // +y.
  constexpr double kRadius = 10.0;
  for (size_t t = 0; t < kPlanSteps; ++t) {
    const double theta = (std::numbers::pi / 2.0) *
                         static_cast<double>(t + 1) /
                         static_cast<double>(kPlanSteps);
    s.plan.push_back(
        {kRadius * std::sin(theta), kRadius * (1.0 - std::cos(theta))});
  }
  s.gt = s.plan;
  // 1 m square right of the final waypoint: clear of the turned box, inside
  // the footprint that keeps the initial heading.
  const OBB2 obstacle = OBB2::FromDims({12.35, 10.0}, 1.0, 1.0, 0.0);
  s.agents.assign(kPlanSteps, {obstacle});
  return s;
}

MotionMetrics ComputeMotionMetrics(const MotionEvalInput& input,
                                   const MotionParams& params) {
  if (input.agents.empty()) throw std::invalid_argument("empty samples");
  MotionMetrics m;
  m.num_gt = static_cast<int64_t>(input.agents.size());
  m.false_positives = input.false_positives;

  double ade_sum = 0.0;
  double fde_sum = 0.0;
  int64_t misses = 0;
  for (const MotionEvalSample& agent : input.agents) {
    if (!agent.matched) continue;
    if (!agent.valid.empty() && agent.valid.size() != agent.gt.size()) {
      throw std::invalid_argument("mask length differs from ground truth");
    }
    std::optional<size_t> last_valid;
    for (size_t t = 0; t < agent.gt.size(); ++t) {
      if (agent.valid.empty() || agent.valid[t]) last_valid = t;
    }
    if (!last_valid) continue;
    if (agent.prediction.modes.empty()) {
      throw std::invalid_argument("matched agent without modes");
    }

    double min_ade = std::numeric_limits<double>::infinity();
    double min_fde = std::numeric_limits<double>::infinity();
    for (const Trajectory& mode : agent.prediction.modes) {
      if (mode.size() < agent.gt.size()) {
        throw std::invalid_argument("mode shorter than ground truth");
      }
      double sum = 0.0;
      size_t n = 0;
      for (size_t t = 0; t < agent.gt.size(); ++t) {
        if (!agent.valid.empty() && !agent.valid[t]) continue;
        sum += Distance(mode[t], agent.gt[t]);
        ++n;
      }
      min_ade = std::min(min_ade, sum / static_cast<double>(n));
      min_fde = std::min(min_fde,
                         Distance(mode[*last_valid], agent.gt[*last_valid]));
    }
    ++m.num_evaluated;
    ade_sum += min_ade;
    fde_sum += min_fde;
    if (min_fde > params.miss_threshold) ++misses;
    if (min_fde <= params.epa_threshold) ++m.hits;
  }

  if (m.num_evaluated > 0) {
    const double n = static_cast<double>(m.num_evaluated);
    m.min_ade = ade_sum / n;
    m.min_fde = fde_sum / n;
    m.miss_rate = static_cast<double>(misses) / n;
  } else {
    m.min_ade = m.min_fde = m.miss_rate =
        std::numeric_limits<double>::quiet_NaN();
  }
  m.epa = std::max(0.0, (static_cast<double>(m.hits) -
                         params.epa_alpha *
                             static_cast<double>(m.false_positives)) /
                            static_cast<double>(m.num_gt));
  return m;
}

}  // namespace sparseplan
