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

#include "dtvsfm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dtvsfm/error.hpp"

namespace dtvsfm {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void check_thresholds(const std::vector<double>& errors, const std::vector<double>& thresholds) {
  if (errors.empty()) fail(ErrorCode::kEmptyInput, "pose metrics need at least one error");
  for (double t : thresholds) {
    if (!(t > 0.0)) fail(ErrorCode::kInvalidArgument, "pose thresholds must be positive");
  }
}

}  // namespace

PoseError pose_error(const PoseSE3& gt, const PoseSE3& est) {
  const double ng = gt.translation.norm();
  const double ne = est.translation.norm();
  if (!(ng > 0.0) || !(ne > 0.0)) {
    fail(ErrorCode::kZeroTranslation, "translation direction undefined for a zero vector");
  }
  PoseError out;
  const Mat3 delta = gt.rotation.transpose() * est.rotation;
  const double c = std::clamp((delta.trace() - 1.0) * 0.5, -1.0, 1.0);
  out.rot_deg = std::acos(c) * kRadToDeg;
  const double ct = std::clamp(gt.translation.dot(est.translation) / (ng * ne), -1.0, 1.0);
  out.trans_deg = std::acos(ct) * kRadToDeg;
  out.max_deg = std::max(out.rot_deg, out.trans_deg);
  return out;
}

std::vector<double> pose_auc(const std::vector<double>& errors,
                             const std::vector<double>& thresholds) {
  check_thresholds(errors, thresholds);
  std::vector<double> out;
  const double n = static_cast<double>(errors.size());
  for (double tau : thresholds) {
    double area = 0.0;
    for (double e : errors) area += std::max(0.0, tau - e);
    out.push_back(100.0 * area / (n * tau));
  }
  return out;
}

std::vector<double> pose_map(const std::vector<double>& errors,
                             const std::vector<double>& thresholds) {
  check_thresholds(errors, thresholds);
  std::vector<double> out;
  for (double tau : thresholds) {
    const auto below = std::count_if(errors.begin(), errors.end(), [&](double e) { return e < tau; });
    out.push_back(100.0 * static_cast<double>(below) / static_cast<double>(errors.size()));
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::kEmptyInput, "median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

namespace {

std::vector<std::size_t> joint_pixels(const DepthMap& gt, const DepthMap& est) {
  if (gt.width() != est.width() || gt.height() != est.height()) {
    fail(ErrorCode::kDimensionMismatch, "depth maps differ in size");
  }
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < gt.depth.size(); ++i) {
    if (gt.is_valid(i) && est.is_valid(i) && gt.depth[i] > 0.0 && est.depth[i] > 0.0) {
      idx.push_back(i);
    }
  }
  if (idx.empty()) fail(ErrorCode::kNoValidPixels, "no jointly valid depth pixels");
  return idx;
}

}  // namespace

double median_scale(const DepthMap& gt, const DepthMap& est) {
  std::vector<double> ratios;
  for (std::size_t i : joint_pixels(gt, est)) ratios.push_back(gt.depth[i] / est.depth[i]);
  return median(std::move(ratios));
}

DepthErrorReport depth_metrics(const DepthMap& gt, const DepthMap& est, bool scale_align) {
  const std::vector<std::size_t> idx = joint_pixels(gt, est);
  DepthErrorReport r;
  r.scale = scale_align ? median_scale(gt, est) : 1.0;
  double sum_inv = 0.0, sum_rel = 0.0, sum_z = 0.0;
  std::vector<double> z(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const double g = gt.depth[idx[j]];
    const double e = r.scale * est.depth[idx[j]];
    sum_inv += std::abs(1.0 / e - 1.0 / g);
    sum_rel += std::abs(e - g) / g;
    z[j] = std::log(e) - std::log(g);
    sum_z += z[j];
  }
  const double n = static_cast<double>(idx.size());
  r.pixels = idx.size();
  r.l1_inv = sum_inv / n;
  r.l1_rel = sum_rel / n;
  // Two-pass form of sqrt(mean(z^2) - mean(z)^2).
  const double mean_z = sum_z / n;
  double var = 0.0;
  for (double v : z) var += (v - mean_z) * (v - mean_z);
  r.sc_inv = std::sqrt(var / n);
  return r;
}

}  // namespace dtvsfm
