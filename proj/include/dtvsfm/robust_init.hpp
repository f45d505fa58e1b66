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

#include <cstdint>
#include <vector>

#include "dtvsfm/geometry.hpp"
#include "dtvsfm/uncertainty.hpp"

namespace dtvsfm {

struct Correspondence {
  PixelCoord ref;
  PixelCoord src;
  int x = 0;  // source grid column of the reference pixel
  int y = 0;  // source grid row
};

using CorrespondenceSet = std::vector<Correspondence>;

/// Indices into the CorrespondenceSet accepted by RANSAC, ascending.
struct InlierSet {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  /// Rasterizes the inliers onto a width x height grid via their grid indices.
  BinaryMask to_mask(const CorrespondenceSet& corr, int width, int height) const;
};

struct RansacConfig {
  double threshold = 1.0;  // Sampson distance, pixels
  double confidence = 0.99;
  int max_iterations = 2000;
  std::uint64_t rng_seed = 0;
  int subsample_stride = 4;
  int refit_rounds = 6;

  void validate() const;
};

struct RansacResult {
  PoseSE3 pose;
  InlierSet inliers;
  int iterations = 0;
  Mat3 essential = Mat3::Zero();
};

/// One correspondence per valid pixel on the stride grid whose confidence is
/// >= min_conf and whose target lies inside the image.
CorrespondenceSet flow_to_correspondences(const FlowField& flow, const ConfidenceMap& conf,
                                          const CameraIntrinsics& k, double min_conf,
                                          int stride);

/// Sampson distance in pixels of one correspondence under essential matrix e.
double sampson_distance(const Mat3& fundamental, const PixelCoord& ref, const PixelCoord& src);
Mat3 fundamental_from_essential(const Mat3& e, const CameraIntrinsics& k);
Mat3 essential_from_pose(const PoseSE3& pose);

/// Normalized (Hartley) 8-point essential matrix from bearing pairs. Returns
/// false when the design matrix has rank < 8. Optional per-pair weights scale
/// the squared algebraic residuals.
bool eight_point_essential(const std::vector<Vec2>& ref_xy, const std::vector<Vec2>& src_xy,
                           Mat3& essential, const std::vector<double>* weights = nullptr);

/// Picks the (R, t) of the four-way decomposition with the most points in
/// front of both cameras. ||t|| = 1.
PoseSE3 decompose_essential(const Mat3& e, const std::vector<Vec2>& ref_xy,
                            const std::vector<Vec2>& src_xy, int* in_front_count = nullptr);

/// True when the midpoint triangulation lies in front of both cameras.
bool triangulates_in_front(const PoseSE3& pose, const Vec2& ref_xy, const Vec2& src_xy);

/// RANSAC over the correspondences. Hypotheses are scored on the stride-grid
/// subset; the returned inlier set classifies every input correspondence
/// under E = [t]x R of the returned pose.
/// Throws kInsufficientMatches (< 8) and kDegenerateGeometry.
RansacResult ransac_essential(const CorrespondenceSet& corr, const CameraIntrinsics& k,
                              const RansacConfig& cfg);

}  // namespace dtvsfm
