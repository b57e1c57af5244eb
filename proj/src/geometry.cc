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

#include "sparseplan/geometry.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sparseplan {

double Vec2::Norm() const { return std::hypot(x, y); }

double Distance(Vec2 a, Vec2 b) { return (a - b).Norm(); }

double NormalizeAngle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(angle, kTwoPi);  // [-pi, pi]
  if (wrapped <= -std::numbers::pi) wrapped += kTwoPi;
  return wrapped;
}

Pose2::Pose2(double x, double y, double yaw)
    : x_(x), y_(y), yaw_(NormalizeAngle(yaw)) {}

Vec2 Pose2::RotateVector(Vec2 v) const {
  const double c = std::cos(yaw_);
  const double s = std::sin(yaw_);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 Pose2::TransformPoint(Vec2 p) const {
  return RotateVector(p) + translation();
}

Pose2 Pose2::Inverse() const {
  const double c = std::cos(yaw_);
  const double s = std::sin(yaw_);
  // R^T * (-t)
  return {-(c * x_ + s * y_), -(-s * x_ + c * y_), -yaw_};
}

Pose2 Compose(const Pose2& a, const Pose2& b) {
  const Vec2 t = a.TransformPoint(b.translation());
  return {t.x, t.y, a.yaw() + b.yaw()};
}

OBB2::OBB2(Vec2 center, Vec2 half_extents, double yaw)
    : center_(center), half_extents_(half_extents), yaw_(NormalizeAngle(yaw)) {
  if (!(half_extents.x > 0.0) || !(half_extents.y > 0.0)) {
    throw std::invalid_argument("non-positive extent");
  }
}

OBB2 OBB2::FromDims(Vec2 center, double length, double width, double yaw) {
  return OBB2(center, {0.5 * length, 0.5 * width}, yaw);
}

std::array<Vec2, 2> OBB2::Axes() const {
  const double c = std::cos(yaw_);
  const double s = std::sin(yaw_);
  return {Vec2{c, s}, Vec2{-s, c}};
}

std::array<Vec2, 4> OBB2::Corners() const {
  const auto [u, v] = Axes();
  const Vec2 du = half_extents_.x * u;
  const Vec2 dv = half_extents_.y * v;
  return {center_ + du + dv, center_ - du + dv, center_ - du - dv,
          center_ + du - dv};
}

bool OBB2::Contains(Vec2 p) const {
  const auto [u, v] = Axes();
  const Vec2 d = p - center_;
  return std::abs(d.Dot(u)) <= half_extents_.x &&
         std::abs(d.Dot(v)) <= half_extents_.y;
}

OBB2 OBB2::Dilated(double margin) const {
  return OBB2(center_, {half_extents_.x + margin, half_extents_.y + margin},
              yaw_);
}

namespace {

// Half-width of the box's shadow on a unit axis.
double ProjectedRadius(const OBB2& box, Vec2 axis) {
  const auto [u, v] = box.Axes();
  return box.half_extents().x * std::abs(u.Dot(axis)) +
         box.half_extents().y * std::abs(v.Dot(axis));
}

}  // namespace

bool ObbOverlap(const OBB2& a, const OBB2& b) {
  const Vec2 d = b.center() - a.center();
  const auto axes_a = a.Axes();
  const auto axes_b = b.Axes();
  for (const auto& axes : {axes_a, axes_b}) {
    for (const Vec2& axis : axes) {
      if (std::abs(d.Dot(axis)) >
          ProjectedRadius(a, axis) + ProjectedRadius(b, axis)) {
        return false;
      }
    }
  }
  return true;
}

std::vector<double> EstimateYaws(std::span<const Vec2> trajectory,
                                 double initial_yaw) {
  if (trajectory.empty()) throw std::invalid_argument("empty trajectory");
  const size_t n = trajectory.size();
  std::vector<double> yaws(n);
  double previous = NormalizeAngle(initial_yaw);
  for (size_t t = 0; t < n; ++t) {
    if (t + 1 < n) {
      const Vec2 step = trajectory[t + 1] - trajectory[t];
      if (step.Norm() >= kStationaryEpsilon) {
        previous = std::atan2(step.y, step.x);
      }
    }
    yaws[t] = previous;
  }
  return yaws;
}

CameraRig::CameraRig(std::vector<Camera> cameras) : cameras_(std::move(cameras)) {
  for (const Camera& cam : cameras_) {
    if (!(cam.intrinsics.fx > 0.0) || !(cam.intrinsics.fy > 0.0)) {
      throw std::invalid_argument("non-positive focal length");
    }
    if (cam.width <= 0 || cam.height <= 0) {
      throw std::invalid_argument("non-positive image size");
    }
  }
}

const Camera& CameraRig::camera(size_t index) const {
  if (index >= cameras_.size()) {
    throw std::out_of_range("camera index out of range");
  }
  return cameras_[index];
}

Projection ProjectPoints(std::span<const Vec3> points_ego,
                         const CameraRig& rig, size_t camera_index) {
  const Camera& cam = rig.camera(camera_index);
  const Eigen::Isometry3d ego_to_camera = cam.camera_to_ego.inverse();
  const CameraIntrinsics& k = cam.intrinsics;
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  Projection out;
  out.pixels.reserve(points_ego.size());
  out.valid.reserve(points_ego.size());
  for (const Vec3& p : points_ego) {
    const Eigen::Vector3d pc = ego_to_camera * Eigen::Vector3d(p.x, p.y, p.z);
    if (!(pc.z() > 0.0)) {
      out.pixels.push_back({kNaN, kNaN});
      out.valid.push_back(false);
      continue;
    }
    const double u = k.fx * pc.x() / pc.z() + k.cx;
    const double v = k.fy * pc.y() / pc.z() + k.cy;
    out.pixels.push_back({u, v});
    out.valid.push_back(u >= 0.0 && u < cam.width && v >= 0.0 &&
                        v < cam.height);
  }
  return out;
}

}  // namespace sparseplan
