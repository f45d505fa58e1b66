/*
Copyright 2026 The dtvsfm Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <Eigen/Core>

#include "dtvsfm/grid.hpp"

namespace dtvsfm {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Pinhole intrinsics. Integer pixel coordinates denote pixel centers.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 2;
  int height = 2;

  bool is_valid() const;
  /// Throws kInvalidArgument when the invariants do not hold.
  void validate() const;

  Mat3 matrix() const;
  /// Normalized ray K^-1 [u v 1]^T (unit z).
  Vec3 bearing(double u, double v) const {
    return {(u - cx) / fx, (v - cy) / fy, 1.0};
  }
  Vec2 project(const Vec3& p) const {
    return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy};
  }
  bool in_bounds(double u, double v) const {
    return u >= 0.0 && v >= 0.0 && u <= width - 1.0 && v <= height - 1.0;
  }
};

/// Rigid transform x_s = R x_r + t (reference camera to source camera).
struct PoseSE3 {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static PoseSE3 identity() { return {}; }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

  bool is_valid(double tol = 1e-9) const;
  void validate(double tol = 1e-9) const;
};

struct Twist {
  Vec3 omega = Vec3::Zero();
  Vec3 nu = Vec3::Zero();

  Vec6 vector() const {
    Vec6 v;
    v << omega, nu;
    return v;
  }
  static Twist from_vector(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }
  double norm() const { return vector().norm(); }
};

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

/// Per-pixel depths with a validity mask.
struct DepthMap {
  Grid<double> depth;
  ByteGrid valid;

  DepthMap() = default;
  DepthMap(int width, int height, double fill = 1.0, bool is_valid = true)
      : depth(width, height, fill), valid(width, height, is_valid ? 1 : 0) {}

  int width() const { return depth.width(); }
  int height() const { return depth.height(); }
  bool is_valid(std::size_t i) const { return valid[i] != 0; }
  std::size_t count_valid() const;
};

/// Per-pixel 2D displacement (du, dv) with a validity mask.
struct FlowField {
  Grid<Vec2> flow;
  ByteGrid valid;

  FlowField() = default;
  FlowField(int width, int height)
      : flow(width, height, Vec2::Zero()), valid(width, height, 1) {}

  int width() const { return flow.width(); }
  int height() const { return flow.height(); }
  bool is_valid(std::size_t i) const { return valid[i] != 0; }
  std::size_t count_valid() const;
};

Mat3 hat(const Vec3& w);
Vec3 vee(const Mat3& m);

PoseSE3 se3_exp(const Twist& xi);
/// Throws kAngleNearPi when the rotation angle is >= pi - 1e-6.
Twist se3_log(const PoseSE3& pose);

PoseSE3 compose(const PoseSE3& a, const PoseSE3& b);
PoseSE3 inverse(const PoseSE3& pose);
/// Left retraction exp(xi) * pose with the rotation re-orthonormalized.
PoseSE3 retract(const Twist& xi, const PoseSE3& pose);

/// Nearest rotation in the Frobenius sense (polar decomposition).
Mat3 nearest_rotation(const Mat3& m);
double rotation_angle(const Mat3& r);

/// Minimum depth of a transformed point for it to count as in front.
inline constexpr double kMinPointDepth = 1e-9;

struct InducedPixel {
  PixelCoord pixel;
  bool in_front = false;
};

/// Transfers a reference pixel with depth into the source image.
/// Throws kNonPositiveInputDepth when depth <= 0.
InducedPixel induced_pixel(const PixelCoord& p_ref, const PoseSE3& pose,
                           double depth, const CameraIntrinsics& k);

/// Dense induced flow. Pixels with invalid depth or projecting behind the
/// camera are invalid in the result. Throws kDimensionMismatch.
FlowField induced_flow(const PoseSE3& pose, const DepthMap& depth,
                       const CameraIntrinsics& k);

/// Serial reference for induced_flow.
FlowField induced_flow_ref(const PoseSE3& pose, const DepthMap& depth,
                           const CameraIntrinsics& k);

}  // namespace dtvsfm
