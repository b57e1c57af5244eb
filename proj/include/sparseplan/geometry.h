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

// Planar poses, oriented boxes, yaw estimation and pinhole projection. All
// lengths are meters, all angles radians.

#ifndef SPARSEPLAN_GEOMETRY_H_
#define SPARSEPLAN_GEOMETRY_H_

#include <array>
#include <span>
#include <vector>

#include <Eigen/Geometry>

namespace sparseplan {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  double Dot(Vec2 o) const { return x * o.x + y * o.y; }
  double Norm() const;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

double Distance(Vec2 a, Vec2 b);

// Wraps an angle into (-pi, pi].
double NormalizeAngle(double angle);

// Rigid transform in the plane. Maps points from its child frame into its
// parent frame: p_parent = R(yaw) * p_child + (x, y).
class Pose2 {
 public:
  Pose2() = default;
  Pose2(double x, double y, double yaw);

  static Pose2 Identity() { return {}; }

  double x() const { return x_; }
  double y() const { return y_; }
  double yaw() const { return yaw_; }
  Vec2 translation() const { return {x_, y_}; }

  Vec2 TransformPoint(Vec2 p) const;
  // Rotation only; for velocities and directions.
  Vec2 RotateVector(Vec2 v) const;
  Pose2 Inverse() const;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double yaw_ = 0.0;
};

// a∘b: first apply b, then a.
Pose2 Compose(const Pose2& a, const Pose2& b);

// Oriented rectangle in the plane. half_extents.x runs along the heading,
// half_extents.y across it.
class OBB2 {
 public:
  // Throws std::invalid_argument unless both half extents are positive.
  OBB2(Vec2 center, Vec2 half_extents, double yaw);

  // Box of full length (along heading) and width (across heading).
  static OBB2 FromDims(Vec2 center, double length, double width, double yaw);

  Vec2 center() const { return center_; }
  Vec2 half_extents() const { return half_extents_; }
  double yaw() const { return yaw_; }

  // Unit heading and lateral axes.
  std::array<Vec2, 2> Axes() const;
  std::array<Vec2, 4> Corners() const;
  // Closed-set membership.
  bool Contains(Vec2 p) const;
  // Same center and yaw, each half extent grown by `margin`.
  OBB2 Dilated(double margin) const;

 private:
  Vec2 center_;
  Vec2 half_extents_;
  double yaw_;
};

// Separating-axis test over the four edge normals. Closed rectangles: boxes
// that only touch are reported as overlapping.
bool ObbOverlap(const OBB2& a, const OBB2& b);

// Headings along a polyline: the yaw at step t points from point t to point
// t + 1. The last step, and any step shorter than kStationaryEpsilon, reuses
// the previous yaw; a degenerate first step falls back to `initial_yaw`.
// Throws std::invalid_argument("empty trajectory") on empty input.
inline constexpr double kStationaryEpsilon = 1e-3;
std::vector<double> EstimateYaws(std::span<const Vec2> trajectory,
                                 double initial_yaw);

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

// Camera frame convention: z along the optical axis, x right, y down.
struct Camera {
  CameraIntrinsics intrinsics;
  // Pose of the camera in the ego frame (camera -> ego).
  Eigen::Isometry3d camera_to_ego = Eigen::Isometry3d::Identity();
  int width = 0;
  int height = 0;
};

class CameraRig {
 public:
  CameraRig() = default;
  // Throws std::invalid_argument on non-positive focal lengths or image size.
  explicit CameraRig(std::vector<Camera> cameras);

  const std::vector<Camera>& cameras() const { return cameras_; }
  const Camera& camera(size_t index) const;
  size_t size() const { return cameras_.size(); }

 private:
  std::vector<Camera> cameras_;
};

struct Projection {
  std::vector<Vec2> pixels;
  // valid[i]: positive depth and pixel inside [0, width) x [0, height).
  std::vector<bool> valid;
};

// Projects ego-frame points into one camera. Points behind the camera keep
// a NaN pixel and are flagged invalid.
Projection ProjectPoints(std::span<const Vec3> points_ego,
                         const CameraRig& rig, size_t camera_index);

}  // namespace sparseplan

#endif  // SPARSEPLAN_GEOMETRY_H_
