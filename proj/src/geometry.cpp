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

#include "dtvsfm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "dtvsfm/error.hpp"

namespace dtvsfm {

namespace {

constexpr double kSmallAngle = 1e-5;
constexpr double kSeriesAngle = 0.1;

// Coefficients of the SO(3)/SE(3) series, free of cancellation at small t.
// a = sin(t)/t, b = (1-cos t)/t^2, c = (t - sin t)/t^3
void series_coefficients(double theta, double& a, double& b, double& c) {
  const double t2 = theta * theta;
  if (theta < kSmallAngle) {
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    const double s = std::sin(0.5 * theta) / (0.5 * theta);
    b = 0.5 * s * s;
  }
  if (theta < kSeriesAngle) {
    c = 1.0 / 6.0 + t2 * (-1.0 / 120.0 + t2 * (1.0 / 5040.0 + t2 * (-1.0 / 362880.0 + t2 / 39916800.0)));
  } else {
    c = (theta - std::sin(theta)) / (t2 * theta);
  }
}

// (1 - a / (2b)) / t^2, the W^2 coefficient of V^-1.
double inverse_v_coefficient(double theta, double a, double b) {
  const double t2 = theta * theta;
  if (theta < kSeriesAngle) {
    return 1.0 / 12.0 + t2 * (1.0 / 720.0 + t2 * (1.0 / 30240.0 + t2 * (1.0 / 1209600.0 + t2 / 47900160.0)));
  }
  return (1.0 - a / (2.0 * b)) / t2;
}

}  // namespace

bool CameraIntrinsics::is_valid() const {
  return fx > 0.0 && fy > 0.0 && width >= 2 && height >= 2 && cx >= 0.0 &&
         cx < width && cy >= 0.0 && cy < height && std::isfinite(fx) &&
         std::isfinite(fy);
}

void CameraIntrinsics::validate() const {
  if (!is_valid()) {
    fail(ErrorCode::kInvalidArgument, "camera intrinsics violate fx,fy > 0, size >= 2, "
                                      "principal point inside the image");
  }
}

Mat3 CameraIntrinsics::matrix() const {
  Mat3 k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

bool PoseSE3::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho < tol && std::abs(rotation.determinant() - 1.0) < tol;
}

void PoseSE3::validate(double tol) const {
  if (!is_valid(tol)) {
    fail(ErrorCode::kInvalidArgument, "pose rotation is not orthonormal with det +1");
  }
}

std::size_t DepthMap::count_valid() const {
  return static_cast<std::size_t>(std::count(valid.values().begin(), valid.values().end(), 1));
}

std::size_t FlowField::count_valid() const {
  return static_cast<std::size_t>(std::count(valid.values().begin(), valid.values().end(), 1));
}

Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

PoseSE3 se3_exp(const Twist& xi) {
  const double theta = xi.omega.norm();
  double a, b, c;
  series_coefficients(theta, a, b, c);
  const Mat3 w = hat(xi.omega);
  const Mat3 w2 = w * w;
  PoseSE3 out;
  out.rotation = Mat3::Identity() + a * w + b * w2;
  const Mat3 v = Mat3::Identity() + b * w + c * w2;
  out.translation = v * xi.nu;
  return out;
}

double rotation_angle(const Mat3& r) {
  const double cos_t = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double sin_t = 0.5 * vee(r - r.transpose()).norm();
  return std::atan2(sin_t, cos_t);
}

Twist se3_log(const PoseSE3& pose) {
  const Mat3& r = pose.rotation;
  const double theta = rotation_angle(r);
  if (theta >= std::numbers::pi - 1e-6) {
    fail(ErrorCode::kAngleNearPi, "se3_log: rotation angle " + std::to_string(theta) +
                                      " is too close to pi");
  }
  Twist out;
  const Vec3 axis_sin = 0.5 * vee(r - r.transpose());  // sin(theta) * axis
  double a, b, c;
  series_coefficients(theta, a, b, c);
  out.omega = axis_sin / a;
  const Mat3 w = hat(out.omega);
  // V^-1 = I - W/2 + (1/t^2)(1 - a/(2b)) W^2
  const double d = inverse_v_coefficient(theta, a, b);
  const Mat3 v_inv = Mat3::Identity() - 0.5 * w + d * w * w;
  out.nu = v_inv * pose.translation;
  return out;
}

PoseSE3 compose(const PoseSE3& a, const PoseSE3& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

PoseSE3 inverse(const PoseSE3& pose) {
  const Mat3 rt = pose.rotation.transpose();
  return {rt, -(rt * pose.translation)};
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

PoseSE3 retract(const Twist& xi, const PoseSE3& pose) {
  PoseSE3 out = compose(se3_exp(xi), pose);
  out.rotation = nearest_rotation(out.rotation);
  return out;
}

namespace {

// Pixel offset between the bearing f (unit z) and the transferred ray q
// (the source-frame point scaled by the inverse depth).
inline Vec2 displacement(const Vec3& f, const Vec3& q, const CameraIntrinsics& k) {
  return {k.fx * (q.x() / q.z() - f.x()), k.fy * (q.y() / q.z() - f.y())};
}

}  // namespace

InducedPixel induced_pixel(const PixelCoord& p_ref, const PoseSE3& pose, double depth,
                           const CameraIntrinsics& k) {
  if (!(depth > 0.0)) {
    fail(ErrorCode::kNonPositiveInputDepth, "induced_pixel: depth must be positive");
  }
  const Vec3 f = k.bearing(p_ref.u, p_ref.v);
  const Vec3 q = pose.rotation * f + pose.translation / depth;
  InducedPixel out;
  out.in_front = depth * q.z() > kMinPointDepth;
  const Vec2 d = displacement(f, q, k);
  out.pixel = {p_ref.u + d.x(), p_ref.v + d.y()};
  return out;
}

namespace {

void check_shape(const DepthMap& depth, const CameraIntrinsics& k) {
  if (depth.width() != k.width || depth.height() != k.height ||
      !depth.depth.same_shape(depth.valid)) {
    fail(ErrorCode::kDimensionMismatch, "induced_flow: depth map does not match the camera");
  }
}

inline void induced_flow_pixel(const PoseSE3& pose, const DepthMap& depth,
                               const CameraIntrinsics& k, int x, int y, FlowField& out) {
  const std::size_t i = depth.depth.index(x, y);
  const double z = depth.depth[i];
  if (!depth.is_valid(i) || !(z > 0.0)) {
    out.flow[i] = Vec2::Zero();
    out.valid[i] = 0;
    return;
  }
  const Vec3 f = k.bearing(x, y);
  const Vec3 q = pose.rotation * f + pose.translation / z;
  if (!(z * q.z() > kMinPointDepth)) {
    out.flow[i] = Vec2::Zero();
    out.valid[i] = 0;
    return;
  }
  out.flow[i] = displacement(f, q, k);
  out.valid[i] = 1;
}

}  // namespace

FlowField induced_flow_ref(const PoseSE3& pose, const DepthMap& depth,
                           const CameraIntrinsics& k) {
  check_shape(depth, k);
  FlowField out(k.width, k.height);
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) induced_flow_pixel(pose, depth, k, x, y, out);
  }
  return out;
}

FlowField induced_flow(const PoseSE3& pose, const DepthMap& depth, const CameraIntrinsics& k) {
  check_shape(depth, k);
  FlowField out(k.width, k.height);
  const int height = k.height;
  const int width = k.width;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) induced_flow_pixel(pose, depth, k, x, y, out);
  }
  return out;
}

}  // namespace dtvsfm
