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

#include "dtvsfm/wba.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "dtvsfm/error.hpp"

namespace dtvsfm {

namespace {

constexpr double kConditionLimit = 1e-12;
constexpr double kMaxDamping = 1e12;

DepthMap inverse_of(const DepthMap& z) {
  DepthMap out(z.width(), z.height(), 0.0, false);
  for (std::size_t i = 0; i < z.depth.size(); ++i) {
    if (z.is_valid(i) && z.depth[i] > 0.0) {
      out.depth[i] = 1.0 / z.depth[i];
      out.valid[i] = 1;
    }
  }
  return out;
}

std::size_t count_weighted(const FlowField& flow, const WeightMap& w) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < w.size(); ++i) n += (w[i] > 0.0 && flow.is_valid(i)) ? 1 : 0;
  return n;
}

DepthMap initial_inverse_depth(const FlowField& flow, const WeightMap& w) {
  DepthMap d(flow.width(), flow.height(), 1.0, false);
  for (std::size_t i = 0; i < w.size(); ++i) d.valid[i] = (w[i] > 0.0 && flow.is_valid(i)) ? 1 : 0;
  return d;
}

void apply_depth_step(DepthMap& inv, const std::vector<DepthBlock>& blocks,
                      const std::vector<double>& delta, const WbaConfig& cfg) {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (!(blocks[i].h > 0.0) || !inv.is_valid(i)) continue;
    inv.depth[i] =
        std::clamp(inv.depth[i] + delta[i], cfg.min_inverse_depth, cfg.max_inverse_depth);
  }
}

}  // namespace

void WbaConfig::validate() const {
  if (max_iterations < 1) fail(ErrorCode::kInvalidArgument, "wba max_iterations must be >= 1");
  if (!(damping_init >= 0.0)) fail(ErrorCode::kInvalidArgument, "wba damping must be >= 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "wba gamma must lie in [0, 1]");
  }
  if (huber_delta && !(*huber_delta > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "huber delta must be positive");
  }
  if (!(min_inverse_depth > 0.0 && max_inverse_depth > min_inverse_depth)) {
    fail(ErrorCode::kInvalidArgument, "inverse depth clamp range is empty");
  }
}

void WbaInputs::validate() const {
  camera.validate();
  if (flow_fwd == nullptr || w_fwd == nullptr) {
    fail(ErrorCode::kInvalidArgument, "wba needs a forward flow and weight map");
  }
  auto check = [&](const FlowField& f, const WeightMap& w) {
    if (f.width() != camera.width || f.height() != camera.height || !f.flow.same_shape(w) ||
        !f.flow.same_shape(f.valid)) {
      fail(ErrorCode::kDimensionMismatch, "wba flow/weight grids do not match the camera");
    }
  };
  check(*flow_fwd, *w_fwd);
  if (bidirectional()) check(*flow_bwd, *w_bwd);
}

double wba_energy(const PoseSE3& pose, const DepthMap& z_r, const DepthMap& z_s,
                  const FlowField& flow_fwd, const FlowField& flow_bwd, const WeightMap& w_fwd,
                  const WeightMap& w_bwd, const CameraIntrinsics& k) {
  WbaInputs in;
  in.camera = k;
  in.flow_fwd = &flow_fwd;
  in.w_fwd = &w_fwd;
  const bool has_bwd = flow_bwd.width() > 0;
  if (has_bwd) {
    in.flow_bwd = &flow_bwd;
    in.w_bwd = &w_bwd;
  }
  in.validate();
  if (z_r.width() != k.width || z_r.height() != k.height ||
      (has_bwd && (z_s.width() != k.width || z_s.height() != k.height))) {
    fail(ErrorCode::kDimensionMismatch, "wba_energy: depth maps do not match the camera");
  }
  WbaState s;
  s.pose = pose;
  s.inv_depth_r = inverse_of(z_r);
  if (has_bwd) s.inv_depth_s = inverse_of(z_s);
  return evaluate_cost(s, in);
}

SchurSolution schur_solve(const NormalEquations& ne, double lambda) {
  if (!(lambda >= 0.0)) fail(ErrorCode::kInvalidArgument, "damping must be >= 0");
  const double scale = 1.0 + lambda;
  Mat6 s = ne.h_pose;
  s.diagonal() *= scale;
  Vec6 g = ne.b_pose;
  auto eliminate = [&](const std::vector<DepthBlock>& blocks) {
    for (const DepthBlock& blk : blocks) {
      if (!(blk.h > 0.0)) continue;
      const double hd = blk.h * scale;
      s.noalias() -= blk.h_pose * blk.h_pose.transpose() / hd;
      g.noalias() -= blk.h_pose * (blk.b / hd);
    }
  };
  eliminate(ne.fwd);
  eliminate(ne.bwd);
  s = 0.5 * (s + s.transpose());

  Eigen::SelfAdjointEigenSolver<Mat6> eig(s, Eigen::EigenvaluesOnly);
  const double max_ev = eig.eigenvalues().maxCoeff();
  const double min_ev = eig.eigenvalues().minCoeff();
  if (!(max_ev > 0.0) || !(min_ev > kConditionLimit * max_ev)) {
    fail(ErrorCode::kSingularSystem, "reduced pose system is rank deficient");
  }
  const Vec6 dxi = s.ldlt().solve(g);

  SchurSolution out;
  out.twist = Twist::from_vector(dxi);
  auto back_substitute = [&](const std::vector<DepthBlock>& blocks, std::vector<double>& delta) {
    delta.assign(blocks.size(), 0.0);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const DepthBlock& blk = blocks[i];
      if (!(blk.h > 0.0)) continue;
      delta[i] = (blk.b - blk.h_pose.dot(dxi)) / (blk.h * scale);
    }
  };
  back_substitute(ne.fwd, out.delta_fwd);
  back_substitute(ne.bwd, out.delta_bwd);
  return out;
}

bool normalize_gauge(WbaState& state) {
  const double n = state.pose.translation.norm();
  if (!(n > 1e-12)) return false;
  state.pose.translation /= n;
  for (double& d : state.inv_depth_r.depth.values()) d *= n;
  for (double& d : state.inv_depth_s.depth.values()) d *= n;
  return true;
}

WbaResult wba_solve(const WbaInputs& in, const PoseSE3& t0, const WbaConfig& cfg) {
  in.validate();
  WbaState init;
  init.pose = t0;
  init.inv_depth_r = initial_inverse_depth(*in.flow_fwd, *in.w_fwd);
  if (in.bidirectional()) init.inv_depth_s = initial_inverse_depth(*in.flow_bwd, *in.w_bwd);
  return wba_solve(in, init, cfg);
}

WbaResult wba_solve(const WbaInputs& in, const WbaState& initial, const WbaConfig& cfg) {
  in.validate();
  cfg.validate();
  initial.pose.validate();
  std::size_t weighted = count_weighted(*in.flow_fwd, *in.w_fwd);
  if (in.bidirectional()) weighted += count_weighted(*in.flow_bwd, *in.w_bwd);
  if (weighted < cfg.min_active_pixels) {
    fail(ErrorCode::kNoValidPixels, "wba needs at least " +
                                        std::to_string(cfg.min_active_pixels) +
                                        " weighted pixels, got " + std::to_string(weighted));
  }

  WbaResult result;
  WbaState& state = result.state;
  state = initial;
  if (!in.bidirectional()) state.inv_depth_s = DepthMap();
  for (double& d : state.inv_depth_r.depth.values()) {
    d = std::clamp(d, cfg.min_inverse_depth, cfg.max_inverse_depth);
  }
  for (double& d : state.inv_depth_s.depth.values()) {
    d = std::clamp(d, cfg.min_inverse_depth, cfg.max_inverse_depth);
  }
  normalize_gauge(state);
  auto fix_shape = [](DepthMap& d, const FlowField& f) {
    if (d.width() != f.width() || d.height() != f.height()) {
      fail(ErrorCode::kDimensionMismatch, "initial inverse depth does not match the flow grid");
    }
  };
  fix_shape(state.inv_depth_r, *in.flow_fwd);
  if (in.bidirectional()) fix_shape(state.inv_depth_s, *in.flow_bwd);

  WbaReport& report = result.report;
  NormalEquations ne = linearize(state, in, cfg.huber_delta);
  if (ne.active < cfg.min_active_pixels) {
    fail(ErrorCode::kNoValidPixels, "too few pixels project in front of both cameras");
  }
  report.initial_cost = ne.cost;
  report.active_pixels = ne.active;
  double lambda = cfg.damping_init;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    SchurSolution step;
    try {
      step = schur_solve(ne, lambda);
    } catch (const Error& e) {
      // A rank-deficient damped system counts as a rejected attempt.
      if (e.code() != ErrorCode::kSingularSystem || lambda * 10.0 > kMaxDamping) throw;
      WbaIteration rec;
      rec.cost = rec.candidate_cost = ne.cost;
      rec.damping = lambda;
      report.iterations.push_back(rec);
      lambda *= 10.0;
      continue;
    }
    WbaIteration rec;
    rec.cost = ne.cost;
    rec.step_norm = step.twist.norm();
    rec.damping = lambda;
    if (rec.step_norm < cfg.step_tolerance) {
      rec.candidate_cost = ne.cost;
      report.iterations.push_back(rec);
      report.converged = true;
      break;
    }
    WbaState cand = state;
    cand.pose = retract(step.twist, state.pose);
    apply_depth_step(cand.inv_depth_r, ne.fwd, step.delta_fwd, cfg);
    if (in.bidirectional()) apply_depth_step(cand.inv_depth_s, ne.bwd, step.delta_bwd, cfg);
    normalize_gauge(cand);
    // linearize() sums pixel costs in the same order as evaluate_cost(), so
    // the accepted cost equals ne.cost at the new linearization point.
    rec.candidate_cost = evaluate_cost(cand, in, cfg.huber_delta);

    if (rec.candidate_cost < ne.cost) {
      rec.accepted = true;
      state = std::move(cand);
      lambda *= 0.5;
      ne = linearize(state, in, cfg.huber_delta);
      report.accepted_costs.push_back(ne.cost);
    } else {
      lambda *= 10.0;
    }
    report.iterations.push_back(rec);
    if (lambda > kMaxDamping) break;
  }
  report.final_cost = ne.cost;
  report.active_pixels = ne.active;
  report.translation_determined = state.pose.translation.norm() > 1e-9;
  return result;
}

}  // namespace dtvsfm
