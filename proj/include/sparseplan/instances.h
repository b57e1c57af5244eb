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

// Sparse instance representation: encoded anchor boxes for agents, fixed
// length polylines for map elements, and the per-track memory queue.

#ifndef SPARSEPLAN_INSTANCES_H_
#define SPARSEPLAN_INSTANCES_H_

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sparseplan/geometry.h"

namespace sparseplan {

using TrackId = std::int64_t;

// Physical box extents. `length` runs along the heading (box x axis),
// `width` across it (box y axis), `height` along z.
struct BoxDims {
  double width = 1.0;
  double height = 1.0;
  double length = 1.0;
};

// Decoded agent state.
struct BoxState {
  Vec3 center;
  BoxDims dims;
  double yaw = 0.0;
  Vec3 velocity;
};

// 11-component anchor:
// {x, y, z, ln w, ln h, ln l, sin yaw, cos yaw, vx, vy, vz}.
struct AnchorBox {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double ln_w = 0.0;
  double ln_h = 0.0;
  double ln_l = 0.0;
  double sin_yaw = 0.0;
  double cos_yaw = 1.0;
  double vx = 0.0;
  double vy = 0.0;
  double vz = 0.0;

  static constexpr size_t kSize = 11;
  std::array<double, kSize> ToArray() const;
  static AnchorBox FromArray(std::span<const double> values);

  Vec2 center2() const { return {x, y}; }
  double yaw() const;
  BoxDims dims() const;

  friend bool operator==(const AnchorBox&, const AnchorBox&) = default;
};

// Throws std::invalid_argument("non-positive extent") if any dim <= 0.
AnchorBox EncodeAnchor(const BoxState& state);
BoxState DecodeAnchor(const AnchorBox& anchor);

// Initial values of the non-location components
// (ln_w, ln_h, ln_l, sin_yaw, cos_yaw, vx, vy, vz).
std::array<double, 8> DefaultAnchorParams();
// Anchor at `center` with DefaultAnchorParams() for everything else.
AnchorBox DefaultAnchorAt(Vec3 center);

// Box center followed by the six face centers (+x, -x, +y, -y, +z, -z in the
// box frame), expressed in the anchor's frame.
inline constexpr size_t kNumKeypoints = 7;
std::array<Vec3, kNumKeypoints> GenerateKeypoints(const AnchorBox& anchor);

// BEV footprint of an anchor.
OBB2 AnchorFootprint(const AnchorBox& anchor);

// Ordered point sequence for one static map element.
class MapPolyline {
 public:
  static constexpr size_t kDefaultNumPoints = 20;

  MapPolyline() = default;
  // Throws std::invalid_argument if fewer than two points are given.
  explicit MapPolyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  size_t size() const { return points_.size(); }

  friend bool operator==(const MapPolyline&, const MapPolyline&) = default;

 private:
  std::vector<Vec2> points_;
};

struct EgoStatus {
  double velocity = 0.0;
  double acceleration = 0.0;
  double angular_velocity = 0.0;
  double steering_angle = 0.0;
};

// Ego anchor for the current frame: origin of the ego frame, yaw 0, forward
// velocity taken from the previous frame's prediction (zero on the first
// frame).
AnchorBox InitEgoAnchor(const BoxDims& ego_dims,
                        std::optional<double> prev_predicted_velocity);

class Instance {
 public:
  Instance() = default;
  Instance(AnchorBox anchor, double confidence,
           std::optional<TrackId> track_id = std::nullopt,
           std::vector<double> embedding = {});

  const AnchorBox& anchor() const { return anchor_; }
  AnchorBox& mutable_anchor() { return anchor_; }
  double confidence() const { return confidence_; }
  void set_confidence(double confidence);
  const std::optional<TrackId>& track_id() const { return track_id_; }
  bool has_track_id() const { return track_id_.has_value(); }
  // IDs are write-once; throws std::logic_error if one is already bound.
  void AssignTrackId(TrackId id);
  const std::vector<double>& embedding() const { return embedding_; }

 private:
  AnchorBox anchor_;
  double confidence_ = 0.0;
  std::optional<TrackId> track_id_;
  std::vector<double> embedding_;
};

// Per-track ring buffers of the last `capacity` frames. Instances without a
// track id are not stored.
class InstanceMemoryQueue {
 public:
  static constexpr size_t kDefaultCapacity = 3;

  struct Entry {
    int64_t frame;
    Instance instance;
  };

  explicit InstanceMemoryQueue(size_t capacity = kDefaultCapacity);

  // Throws std::invalid_argument("frame regression") unless `frame` is
  // greater than every frame pushed so far. Pushing an empty list is a no-op.
  void Push(int64_t frame, std::span<const Instance> instances);

  // Oldest first; empty for unknown tracks.
  std::vector<Instance> Query(TrackId track_id) const;
  std::vector<Entry> QueryEntries(TrackId track_id) const;

  size_t capacity() const { return capacity_; }
  size_t num_tracks() const { return tracks_.size(); }
  std::optional<int64_t> last_frame() const { return last_frame_; }

 private:
  size_t capacity_;
  std::optional<int64_t> last_frame_;
  std::map<TrackId, std::deque<Entry>> tracks_;
};

}  // namespace sparseplan

#endif  // SPARSEPLAN_INSTANCES_H_
