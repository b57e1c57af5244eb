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

#include "sparseplan/instances.h"

#include <cmath>
#include <stdexcept>

namespace sparseplan {

std::array<double, AnchorBox::kSize> AnchorBox::ToArray() const {
  return {x, y, z, ln_w, ln_h, ln_l, sin_yaw, cos_yaw, vx, vy, vz};
}

AnchorBox AnchorBox::FromArray(std::span<const double> v) {
  if (v.size() != kSize) {
    throw std::invalid_argument("anchor box needs 11 components");
  }
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]};
}

double AnchorBox::yaw() const { return std::atan2(sin_yaw, cos_yaw); }

BoxDims AnchorBox::dims() const {
  return {std::exp(ln_w), std::exp(ln_h), std::exp(ln_l)};
}

AnchorBox EncodeAnchor(const BoxState& s) {
  if (!(s.dims.width > 0.0) || !(s.dims.height > 0.0) ||
      !(s.dims.length > 0.0)) {
    throw std::invalid_argument("non-positive extent");
  }
  return {s.center.x,          s.center.y,           s.center.z,
          std::log(s.dims.width), std::log(s.dims.height), std::log(s.dims.length),
          std::sin(s.yaw),     std::cos(s.yaw),      s.velocity.x,
          s.velocity.y,        s.velocity.z};
}

BoxState DecodeAnchor(const AnchorBox& a) {
  return {{a.x, a.y, a.z}, a.dims(), a.yaw(), {a.vx, a.vy, a.vz}};
}

std::array<double, 8> DefaultAnchorParams() {
  return {1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0};
}

AnchorBox DefaultAnchorAt(Vec3 center) {
  const auto p = DefaultAnchorParams();
  return {center.x, center.y, center.z, p[0], p[1], p[2],
          p[3],     p[4],     p[5],     p[6], p[7]};
}

std::array<Vec3, kNumKeypoints> GenerateKeypoints(const AnchorBox& a) {
  const BoxDims d = a.dims();
  const double hl = 0.5 * d.length;
  const double hw = 0.5 * d.width;
  const double hh = 0.5 * d.height;
  // Offsets in the box frame.
  const std::array<Vec3, kNumKeypoints> local = {{{0, 0, 0},
                                                  {hl, 0, 0},
                                                  {-hl, 0, 0},
                                                  {0, hw, 0},
                                                  {0, -hw, 0},
                                                  {0, 0, hh},
                                                  {0, 0, -hh}}};
  // sin/cos are used directly so that a non-unit pair is not silently
  // renormalized through atan2.
  const double c = a.cos_yaw;
  const double s = a.sin_yaw;
  std::array<Vec3, kNumKeypoints> out;
  for (size_t i = 0; i < kNumKeypoints; ++i) {
    const Vec3& p = local[i];
    out[i] = {a.x + c * p.x - s * p.y, a.y + s * p.x + c * p.y, a.z + p.z};
  }
  return out;
}

OBB2 AnchorFootprint(const AnchorBox& a) {
  const BoxDims d = a.dims();
  return OBB2::FromDims(a.center2(), d.length, d.width, a.yaw());
}

MapPolyline::MapPolyline(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw std::invalid_argument("polyline needs at least two points");
  }
}

AnchorBox InitEgoAnchor(const BoxDims& ego_dims,
                        std::optional<double> prev_predicted_velocity) {
  BoxState s;
  s.dims = ego_dims;
  s.velocity = {prev_predicted_velocity.value_or(0.0), 0.0, 0.0};
  return EncodeAnchor(s);
}

Instance::Instance(AnchorBox anchor, double confidence,
                   std::optional<TrackId> track_id,
                   std::vector<double> embedding)
    : anchor_(anchor), embedding_(std::move(embedding)) {
  set_confidence(confidence);
  if (track_id) AssignTrackId(*track_id);
}

void Instance::set_confidence(double confidence) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw std::invalid_argument("confidence outside [0, 1]");
  }
  confidence_ = confidence;
}

void Instance::AssignTrackId(TrackId id) {
  if (track_id_) throw std::logic_error("track id already assigned");
  if (id < 0) throw std::invalid_argument("negative track id");
  track_id_ = id;
}

InstanceMemoryQueue::InstanceMemoryQueue(size_t capacity)
    : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("zero queue capacity");
}

void InstanceMemoryQueue::Push(int64_t frame,
                               std::span<const Instance> instances) {
  if (instances.empty()) return;
  if (last_frame_ && frame <= *last_frame_) {
    throw std::invalid_argument("frame regression");
  }
  last_frame_ = frame;
  for (const Instance& inst : instances) {
    if (!inst.has_track_id()) continue;
    auto& ring = tracks_[*inst.track_id()];
    // A track seen twice in one push keeps the later instance.
    if (!ring.empty() && ring.back().frame == frame) {
      ring.back().instance = inst;
      continue;
    }
    ring.push_back({frame, inst});
    if (ring.size() > capacity_) ring.pop_front();
  }
}

std::vector<InstanceMemoryQueue::Entry> InstanceMemoryQueue::QueryEntries(
    TrackId track_id) const {
  auto it = tracks_.find(track_id);
  if (it == tracks_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<Instance> InstanceMemoryQueue::Query(TrackId track_id) const {
  std::vector<Instance> out;
  for (const Entry& e : QueryEntries(track_id)) out.push_back(e.instance);
  return out;
}

}  // namespace sparseplan
