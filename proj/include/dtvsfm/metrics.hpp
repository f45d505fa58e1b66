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

#include <vector>

#include "dtvsfm/geometry.hpp"

namespace dtvsfm {

struct PoseError {
  double rot_deg = 0.0;
  double trans_deg = 0.0;
  double max_deg = 0.0;
};

struct DepthErrorReport {
  double l1_inv = 0.0;
  double sc_inv = 0.0;
  double l1_rel = 0.0;
  std::size_t pixels = 0;
  double scale = 1.0;  // factor applied to the estimate before scoring
};

/// Geodesic rotation angle and translation-direction angle, degrees.
/// Throws kZeroTranslation.
PoseError pose_error(const PoseSE3& gt, const PoseSE3& est);

/// AUC@tau = 100 * sum_i max(0, tau - e_i) / (N tau). Throws kEmptyInput.
std::vector<double> pose_auc(const std::vector<double>& errors,
                             const std::vector<double>& thresholds);
/// mAP@tau = 100 * fraction of errors strictly below tau. Throws kEmptyInput.
std::vector<double> pose_map(const std::vector<double>& errors,
                             const std::vector<double>& thresholds);

/// Median of gt/est over jointly valid pixels.
double median_scale(const DepthMap& gt, const DepthMap& est);

/// DeMoN-style depth errors over jointly valid pixels. With scale_align the
/// estimate is first multiplied by median_scale(gt, est).
/// Throws kNoValidPixels, kDimensionMismatch.
DepthErrorReport depth_metrics(const DepthMap& gt, const DepthMap& est, bool scale_align = false);

double median(std::vector<double> values);

}  // namespace dtvsfm
