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

#include "dtvsfm/geometry.hpp"
#include "dtvsfm/uncertainty.hpp"

namespace dtvsfm {

enum class DepthModelKind { kConstant, kSlantedPlane, kMultiPlane, kFractalPerlin };

struct DepthModel {
  DepthModelKind kind = DepthModelKind::kFractalPerlin;
  double base_depth = 4.0;
  double amplitude = 1.0;     // fractal: +/- depth variation
  double slope_x = 0.0;       // slanted plane: 1/Z = (1 + sx*x + sy*y) / base
  double slope_y = 0.0;
  int planes = 3;             // multi-plane: foreground rectangles
  int octaves = 4;
  double feature_pixels = 0;  // fractal lattice spacing; 0 = max(W, H) / 4
};

struct PoseModel {
  double rotation_deg = 5.0;
  Vec3 rotation_axis = Vec3::Zero();  // zero = random unit axis
  double translation = 0.4;           // ||t||, scene units
  Vec3 translation_dir = Vec3::Zero();  // zero = random, |z| <= 0.3 before normalization
};

struct SceneConfig {
  int width = 64;
  int height = 48;
  double focal = 0.0;  // pixels; 0 = width
  DepthModel depth;
  PoseModel pose;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

enum class ConfidenceModel { kOracle, kCalibrated, kConstant };

struct CorruptionConfig {
  double noise_sigma = 0.0;  // pixels
  double outlier_rate = 0.0;
  ConfidenceModel confidence_model = ConfidenceModel::kOracle;
  double oracle_scale = 1.0;
  double constant_confidence = 1.0;
  double confidence_radius = 1.0;  // calibrated model
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct SyntheticScene {
  CameraIntrinsics camera;
  PoseSE3 gt_pose;
  DepthMap gt_depth_r;
  DepthMap gt_depth_s;
};

struct RenderedFlow {
  FlowField fwd;
  FlowField bwd;
  FlowField clean_fwd;
  FlowField clean_bwd;
  ConfidenceMap conf_fwd;
  ConfidenceMap conf_bwd;
  BinaryMask outliers_fwd;
  BinaryMask outliers_bwd;
};

/// Deterministic in rng_seed. The source depth is the reference surface
/// forward-warped into the source camera with a z-buffer; uncovered source
/// pixels are invalid.
SyntheticScene generate_scene(const SceneConfig& cfg);

/// Clean flow is the induced flow of the ground truth in both directions,
/// with occluded reference pixels invalidated. Corruption adds Gaussian noise,
/// then replaces exactly floor(rate * N_valid) targets per direction with
/// uniform in-image pixels.
RenderedFlow render_flow(const SyntheticScene& scene, const CorruptionConfig& cfg);

/// Counter-based random streams; the value depends only on (seed, stream, index).
std::uint64_t hash_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
double uniform_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
double gaussian_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace dtvsfm
