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
#include <vector>

#include <Eigen/Core>

#include "dtvsfm/geometry.hpp"
#include "dtvsfm/uncertainty.hpp"

namespace dtvsfm {

/// Pose plus inverse depths for both images. `inv_depth_*` store d = 1/Z.
struct WbaState {
  PoseSE3 pose;
  DepthMap inv_depth_r;
  DepthMap inv_depth_s;
};

struct WbaConfig {
  int max_iterations = 10;       // GN attempts, rejected steps included
  double step_tolerance = 1e-8;  // twist-step norm
  double damping_init = 1e-4;
  double gamma = 0.1;
  std::optional<double> huber_delta;  // pixels; off when empty
  double min_inverse_depth = 1e-4;
  double max_inverse_depth = 1e4;
  std::size_t min_active_pixels = 20;

  void validate() const;
};

/// Observations for both directions. The backward pair may be absent, in
/// which case only the forward term is optimized.
struct WbaInputs {
  CameraIntrinsics camera;
  const FlowField* flow_fwd = nullptr;
  const WeightMap* w_fwd = nullptr;
  const FlowField* flow_bwd = nullptr;
  const WeightMap* w_bwd = nullptr;

  bool bidirectional() const { return flow_bwd != nullptr && w_bwd != nullptr; }
  void validate() const;
};

struct WbaIteration {
  double cost = 0.0;            // cost at the linearization point
  double candidate_cost = 0.0;  // cost after the tentative step
  double step_norm = 0.0;
  double damping = 0.0;
  bool accepted = false;
};

struct WbaReport {
  std::vector<WbaIteration> iterations;
  std::vector<double> accepted_costs;  // strictly decreasing
  double initial_cost = 0.0;
  double final_cost = 0.0;
  bool converged = false;
  bool translation_determined = true;
  std::size_t active_pixels = 0;
};

struct WbaResult {
  WbaState state;
  WbaReport report;
};

/// Linearization of one pixel's induced pixel with respect to the left twist
/// on T (omega first, then nu) and the pixel's inverse depth.
struct PixelLinearization {
  bool valid = false;
  Vec2 residual = Vec2::Zero();  // p_flow - p_induced
  Eigen::Matrix<double, 2, 6> j_pose = Eigen::Matrix<double, 2, 6>::Zero();
  Vec2 j_depth = Vec2::Zero();
};

/// Reference-image pixel (x, y) with inverse depth `inv_depth`, observed at
/// p + flow in the source image.
PixelLinearization linearize_forward_pixel(const PoseSE3& pose, double inv_depth, int x, int y,
                                           const Vec2& flow, const CameraIntrinsics& k);
/// Source-image pixel observed in the reference image, transferred by T^-1.
PixelLinearization linearize_backward_pixel(const PoseSE3& pose, double inv_depth, int x, int y,
                                            const Vec2& flow, const CameraIntrinsics& k);

struct DepthBlock {
  double h = 0.0;               // J_d^T W J_d
  Vec6 h_pose = Vec6::Zero();   // J_pose^T W J_d
  double b = 0.0;               // J_d^T W r
};

/// Gauss-Newton normal equations with the per-pixel depth blocks kept apart.
struct NormalEquations {
  Mat6 h_pose = Mat6::Zero();
  Vec6 b_pose = Vec6::Zero();
  std::vector<DepthBlock> fwd;
  std::vector<DepthBlock> bwd;
  double cost = 0.0;
  std::size_t active = 0;
};

struct SchurSolution {
  Twist twist;
  std::vector<double> delta_fwd;
  std::vector<double> delta_bwd;
};

/// Weighted objective E_fwd(T, Z_r) + E_bwd(T^-1, Z_s), depths in scene units.
/// An empty flow_bwd (0 x 0) drops the backward term.
double wba_energy(const PoseSE3& pose, const DepthMap& z_r, const DepthMap& z_s,
                  const FlowField& flow_fwd, const FlowField& flow_bwd, const WeightMap& w_fwd,
                  const WeightMap& w_bwd, const CameraIntrinsics& k);

/// Cost of a state in its inverse-depth parametrization (Huber when set).
double evaluate_cost(const WbaState& state, const WbaInputs& in,
                     std::optional<double> huber_delta = std::nullopt);
double evaluate_cost_ref(const WbaState& state, const WbaInputs& in,
                         std::optional<double> huber_delta = std::nullopt);

/// Row-blocked OpenMP assembly with a fixed-order reduction; the result does
/// not depend on the thread count.
NormalEquations linearize(const WbaState& state, const WbaInputs& in,
                          std::optional<double> huber_delta = std::nullopt);
/// Serial single-accumulator reference for linearize.
NormalEquations linearize_ref(const WbaState& state, const WbaInputs& in,
                              std::optional<double> huber_delta = std::nullopt);

/// Eliminates the depth blocks and solves the damped 6x6 system. Damping
/// scales every diagonal entry of the joint system by (1 + lambda).
/// Throws kSingularSystem.
SchurSolution schur_solve(const NormalEquations& ne, double lambda);

/// Initializes inverse depths to one and runs damped Gauss-Newton from T0.
/// Throws kNoValidPixels, kSingularSystem.
WbaResult wba_solve(const WbaInputs& in, const PoseSE3& t0, const WbaConfig& cfg);
/// Same, from an explicit initial state (warm start).
WbaResult wba_solve(const WbaInputs& in, const WbaState& initial, const WbaConfig& cfg);

/// Rescales (t, d_r, d_s) so that ||t|| = 1. Returns false when ||t|| ~ 0.
bool normalize_gauge(WbaState& state);

}  // namespace dtvsfm
