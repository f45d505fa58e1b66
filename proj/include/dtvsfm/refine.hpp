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

#include <optional>
#include <string>
#include <vector>

#include "dtvsfm/geometry.hpp"
#include "dtvsfm/metrics.hpp"
#include "dtvsfm/robust_init.hpp"
#include "dtvsfm/uncertainty.hpp"
#include "dtvsfm/wba.hpp"

namespace dtvsfm {

struct RefineConfig {
  double sigma = 2.0;  // RBF bandwidth, pixels
  int outer_iterations = 4;
  double mixup_alpha = 0.5;

  void validate() const;
};

/// Which evidence forms the WBA mask M and whether confidence multiplies it.
enum class MaskMode {
  kConfRansac,  // m = [c >= gamma] & inlier, w = m * c
  kConf,        // m = [c >= gamma],          w = m * c
  kRansac,      // m = inlier,                w = m
  kNone,        // w = 1 on valid flow
};

/// How the backward inlier set is derived from the forward RANSAC result.
enum class BackwardInliers {
  kNearest,  // inlier status of the nearest reference pixel the flow lands on
  kSampson,  // Sampson test of the backward correspondence under E
};

struct PipelineConfig {
  RansacConfig ransac;
  WbaConfig wba;
  RefineConfig refine;
  ConfidenceConfig confidence;
  MaskMode mask_mode = MaskMode::kConfRansac;
  BackwardInliers backward_inliers = BackwardInliers::kNearest;
  bool bidirectional = true;
  double ransac_min_confidence = 0.0;

  void validate() const;
};

struct PipelineInputs {
  CameraIntrinsics camera;
  const FlowField* flow_fwd = nullptr;
  const ConfidenceMap* conf_fwd = nullptr;
  const FlowField* flow_bwd = nullptr;  // optional
  const ConfidenceMap* conf_bwd = nullptr;
};

struct GroundTruth {
  PoseSE3 pose;
  std::optional<DepthMap> depth_r;
};

struct IterationDiagnostics {
  int iteration = 0;
  PoseSE3 pose;
  double wba_initial_cost = 0.0;
  double wba_final_cost = 0.0;
  int wba_iterations = 0;
  bool wba_converged = false;
  double weight_sum_fwd = 0.0;
  double weight_sum_bwd = 0.0;
  std::optional<PoseError> pose_error;
  std::optional<DepthErrorReport> depth_error;
};

struct SfmResult {
  PoseSE3 pose;
  DepthMap depth_r;
  DepthMap depth_s;
  FlowField flow_fwd;
  FlowField flow_bwd;
  WeightMap w_fwd;
  WeightMap w_bwd;
  RansacResult ransac;
  std::vector<IterationDiagnostics> diagnostics;
  bool bidirectional = false;
  bool warning = false;
  std::string warning_message;
};

/// w := exp(-||flow - induced||^2 / (2 sigma^2)) * w; zero where either
/// flow is invalid. Throws kDimensionMismatch.
WeightMap refine_weights(const FlowField& flow, const FlowField& induced, const WeightMap& weights,
                         double sigma);
WeightMap refine_weights_ref(const FlowField& flow, const FlowField& induced,
                             const WeightMap& weights, double sigma);

/// alpha * flow + (1 - alpha) * induced; validity is the conjunction.
FlowField flow_mixup(const FlowField& flow, const FlowField& induced, double alpha);

/// Backward inlier mask from the forward inlier mask by nearest-pixel lookup.
BinaryMask backward_inliers_nearest(const FlowField& flow_bwd, const BinaryMask& fwd_inliers);
/// Backward inlier mask by the Sampson test under the forward essential matrix.
BinaryMask backward_inliers_sampson(const FlowField& flow_bwd, const Mat3& essential,
                                    const CameraIntrinsics& k, double threshold);

/// Weights for one direction under the given mask mode.
WeightMap directional_weights(const FlowField& flow, const ConfidenceMap& conf,
                              const BinaryMask& inliers, double gamma, MaskMode mode);

/// depth = 1 / inverse depth where valid.
DepthMap depth_from_inverse(const DepthMap& inv_depth);

/// Correspondences -> RANSAC -> masks and weights -> WBA, then the outer
/// reweight / mixup / re-solve loop. Errors in an outer iteration keep the
/// last good state and set `warning`.
SfmResult run_pipeline(const PipelineInputs& in, const PipelineConfig& cfg,
                       const GroundTruth* gt = nullptr);

}  // namespace dtvsfm
