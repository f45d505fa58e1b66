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

#include <cmath>
#include <vector>

#include "dtvsfm/error.hpp"
#include "dtvsfm/wba.hpp"

namespace dtvsfm {

namespace {

using Mat23 = Eigen::Matrix<double, 2, 3>;

Mat23 projection_jacobian(const Vec3& q, const CameraIntrinsics& k) {
  const double iz = 1.0 / q.z();
  Mat23 j;
  j << k.fx * iz, 0.0, -k.fx * q.x() * iz * iz, 0.0, k.fy * iz, -k.fy * q.y() * iz * iz;
  return j;
}

// Huber IRLS factor and cost for a residual of norm `r`, multiplied by the
// pixel weight outside.
inline void robust_terms(double r2, std::optional<double> delta, double& rho, double& cost) {
  if (!delta) {
    rho = 1.0;
    cost = r2;
    return;
  }
  const double r = std::sqrt(r2);
  if (r <= *delta) {
    rho = 1.0;
    cost = r2;
  } else {
    rho = *delta / r;
    cost = 2.0 * *delta * r - *delta * *delta;
  }
}

struct Accum {
  Mat6 h = Mat6::Zero();
  Vec6 b = Vec6::Zero();
  double cost = 0.0;
  std::size_t active = 0;

  void add(const Accum& o) {
    h += o.h;
    b += o.b;
    cost += o.cost;
    active += o.active;
  }
};

enum class Direction { kForward, kBackward };

struct DirectionView {
  const FlowField* flow;
  const WeightMap* weights;
  const DepthMap* inv_depth;
  Direction dir;
};

std::vector<DirectionView> directions(const WbaState& s, const WbaInputs& in) {
  std::vector<DirectionView> out;
  out.push_back({in.flow_fwd, in.w_fwd, &s.inv_depth_r, Direction::kForward});
  if (in.bidirectional()) {
    out.push_back({in.flow_bwd, in.w_bwd, &s.inv_depth_s, Direction::kBackward});
  }
  return out;
}

inline PixelLinearization linearize_pixel(const DirectionView& v, const PoseSE3& pose, int x,
                                          int y, const CameraIntrinsics& k) {
  const std::size_t i = v.flow->flow.index(x, y);
  const double d = v.inv_depth->depth[i];
  return v.dir == Direction::kForward
             ? linearize_forward_pixel(pose, d, x, y, v.flow->flow[i], k)
             : linearize_backward_pixel(pose, d, x, y, v.flow->flow[i], k);
}

inline bool pixel_active(const DirectionView& v, std::size_t i) {
  return (*v.weights)[i] > 0.0 && v.flow->is_valid(i) && v.inv_depth->is_valid(i);
}

// Accumulates pixel (x, y) into `acc` and writes its depth block.
inline void accumulate_pixel(const DirectionView& v, const PoseSE3& pose, int x, int y,
                             const CameraIntrinsics& k, std::optional<double> huber,
                             Accum& acc, DepthBlock& block) {
  block = DepthBlock{};
  const std::size_t i = v.flow->flow.index(x, y);
  if (!pixel_active(v, i)) return;
  const PixelLinearization lin = linearize_pixel(v, pose, x, y, k);
  if (!lin.valid) return;
  double rho, cost;
  robust_terms(lin.residual.squaredNorm(), huber, rho, cost);
  const double w = (*v.weights)[i];
  const double we = w * rho;
  acc.h.noalias() += we * lin.j_pose.transpose() * lin.j_pose;
  acc.b.noalias() += we * lin.j_pose.transpose() * lin.residual;
  acc.cost += w * cost;
  ++acc.active;
  block.h = we * lin.j_depth.squaredNorm();
  block.h_pose = we * lin.j_pose.transpose() * lin.j_depth;
  block.b = we * lin.j_depth.dot(lin.residual);
}

inline double pixel_cost(const DirectionView& v, const PoseSE3& pose, int x, int y,
                         const CameraIntrinsics& k, std::optional<double> huber) {
  const std::size_t i = v.flow->flow.index(x, y);
  if (!pixel_active(v, i)) return 0.0;
  const PixelLinearization lin = linearize_pixel(v, pose, x, y, k);
  if (!lin.valid) return 0.0;
  double rho, cost;
  robust_terms(lin.residual.squaredNorm(), huber, rho, cost);
  return (*v.weights)[i] * cost;
}

}  // namespace

PixelLinearization linearize_forward_pixel(const PoseSE3& pose, double inv_depth, int x, int y,
                                           const Vec2& flow, const CameraIntrinsics& k) {
  PixelLinearization out;
  const Vec3 f = k.bearing(x, y);
  // q = d * (R X + t) with X = f / d
  const Vec3 q = pose.rotation * f + inv_depth * pose.translation;
  if (!(q.z() > kMinPointDepth * inv_depth)) return out;
  out.valid = true;
  out.residual = Vec2(x, y) + flow - k.project(q);
  const Mat23 jq = projection_jacobian(q, k);
  out.j_pose.leftCols<3>() = -jq * hat(q);
  out.j_pose.rightCols<3>() = inv_depth * jq;
  out.j_depth = jq * pose.translation;
  return out;
}

PixelLinearization linearize_backward_pixel(const PoseSE3& pose, double inv_depth, int x, int y,
                                            const Vec2& flow, const CameraIntrinsics& k) {
  PixelLinearization out;
  const Vec3 f = k.bearing(x, y);
  const Mat3 rt = pose.rotation.transpose();
  // q = d * R^T (X - t) with X = f / d
  const Vec3 q = rt * f - inv_depth * (rt * pose.translation);
  if (!(q.z() > kMinPointDepth * inv_depth)) return out;
  out.valid = true;
  out.residual = Vec2(x, y) + flow - k.project(q);
  const Mat23 jq = projection_jacobian(q, k);
  // (exp(xi) T)^-1 = T^-1 exp(-xi)
  out.j_pose.leftCols<3>() = jq * rt * hat(f);
  out.j_pose.rightCols<3>() = -inv_depth * (jq * rt);
  out.j_depth = -(jq * (rt * pose.translation));
  return out;
}

NormalEquations linearize_ref(const WbaState& state, const WbaInputs& in,
                              std::optional<double> huber_delta) {
  in.validate();
  const CameraIntrinsics& k = in.camera;
  NormalEquations ne;
  Accum acc;
  for (const DirectionView& v : directions(state, in)) {
    std::vector<DepthBlock>& blocks = v.dir == Direction::kForward ? ne.fwd : ne.bwd;
    blocks.assign(v.flow->flow.size(), DepthBlock{});
    for (int y = 0; y < k.height; ++y) {
      for (int x = 0; x < k.width; ++x) {
        accumulate_pixel(v, state.pose, x, y, k, huber_delta, acc,
                         blocks[v.flow->flow.index(x, y)]);
      }
    }
  }
  ne.h_pose = acc.h;
  ne.b_pose = acc.b;
  ne.cost = acc.cost;
  ne.active = acc.active;
  return ne;
}

NormalEquations linearize(const WbaState& state, const WbaInputs& in,
                          std::optional<double> huber_delta) {
  in.validate();
  const CameraIntrinsics& k = in.camera;
  const int width = k.width;
  const int height = k.height;
  NormalEquations ne;
  Accum total;
  for (const DirectionView& v : directions(state, in)) {
    std::vector<DepthBlock>& blocks = v.dir == Direction::kForward ? ne.fwd : ne.bwd;
    blocks.assign(v.flow->flow.size(), DepthBlock{});
    std::vector<Accum> rows(static_cast<std::size_t>(height));
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
      Accum& acc = rows[static_cast<std::size_t>(y)];
      for (int x = 0; x < width; ++x) {
        accumulate_pixel(v, state.pose, x, y, k, huber_delta, acc,
                         blocks[v.flow->flow.index(x, y)]);
      }
    }
    for (const Accum& r : rows) total.add(r);
  }
  ne.h_pose = total.h;
  ne.b_pose = total.b;
  ne.cost = total.cost;
  ne.active = total.active;
  return ne;
}

double evaluate_cost_ref(const WbaState& state, const WbaInputs& in,
                         std::optional<double> huber_delta) {
  in.validate();
  const CameraIntrinsics& k = in.camera;
  double cost = 0.0;
  for (const DirectionView& v : directions(state, in)) {
    for (int y = 0; y < k.height; ++y) {
      for (int x = 0; x < k.width; ++x) cost += pixel_cost(v, state.pose, x, y, k, huber_delta);
    }
  }
  return cost;
}

double evaluate_cost(const WbaState& state, const WbaInputs& in,
                     std::optional<double> huber_delta) {
  in.validate();
  const CameraIntrinsics& k = in.camera;
  const int width = k.width;
  const int height = k.height;
  double cost = 0.0;
  for (const DirectionView& v : directions(state, in)) {
    std::vector<double> rows(static_cast<std::size_t>(height), 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
      double acc = 0.0;
      for (int x = 0; x < width; ++x) acc += pixel_cost(v, state.pose, x, y, k, huber_delta);
      rows[static_cast<std::size_t>(y)] = acc;
    }
    for (double r : rows) cost += r;
  }
  return cost;
}

}  // namespace dtvsfm
