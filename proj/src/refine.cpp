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

#include "dtvsfm/refine.hpp"

#include <cmath>

#include "dtvsfm/error.hpp"

namespace dtvsfm {

namespace {

void check_pair(const FlowField& a, const FlowField& b) {
  if (!a.flow.same_shape(b.flow)) fail(ErrorCode::kDimensionMismatch, "flow fields differ in size");
}

inline double rbf_weight(const FlowField& flow, const FlowField& induced, const WeightMap& w,
                         double inv_two_sigma2, std::size_t i) {
  if (!flow.is_valid(i) || !induced.is_valid(i)) return 0.0;
  const double d2 = (flow.flow[i] - induced.flow[i]).squaredNorm();
  return std::exp(-d2 * inv_two_sigma2) * w[i];
}

double weight_sum(const WeightMap& w) {
  double s = 0.0;
  for (double v : w.values()) s += v;
  return s;
}

}  // namespace

void RefineConfig::validate() const {
  if (!(sigma > 0.0)) fail(ErrorCode::kInvalidArgument, "refine sigma must be > 0");
  if (outer_iterations < 0) fail(ErrorCode::kInvalidArgument, "outer_iterations must be >= 0");
  if (!(mixup_alpha >= 0.0 && mixup_alpha <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "mixup_alpha must lie in [0, 1]");
  }
}

void PipelineConfig::validate() const {
  ransac.validate();
  wba.validate();
  refine.validate();
  if (!(confidence.radius > 0.0) || confidence.grid_cell < 1 ||
      !(confidence.grid_quantile >= 0.0 && confidence.grid_quantile <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "invalid confidence configuration");
  }
  if (!(ransac_min_confidence >= 0.0 && ransac_min_confidence <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "ransac_min_confidence must lie in [0, 1]");
  }
}

WeightMap refine_weights_ref(const FlowField& flow, const FlowField& induced,
                             const WeightMap& weights, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::kInvalidArgument, "refine sigma must be > 0");
  check_pair(flow, induced);
  if (!flow.flow.same_shape(weights)) fail(ErrorCode::kDimensionMismatch, "weights differ in size");
  WeightMap out(weights.width(), weights.height(), 0.0);
  const double k = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rbf_weight(flow, induced, weights, k, i);
  return out;
}

WeightMap refine_weights(const FlowField& flow, const FlowField& induced, const WeightMap& weights,
                         double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::kInvalidArgument, "refine sigma must be > 0");
  check_pair(flow, induced);
  if (!flow.flow.same_shape(weights)) fail(ErrorCode::kDimensionMismatch, "weights differ in size");
  WeightMap out(weights.width(), weights.height(), 0.0);
  const double k = 1.0 / (2.0 * sigma * sigma);
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const auto i = static_cast<std::size_t>(j);
    out[i] = rbf_weight(flow, induced, weights, k, i);
  }
  return out;
}

FlowField flow_mixup(const FlowField& flow, const FlowField& induced, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1]");
  check_pair(flow, induced);
  FlowField out(flow.width(), flow.height());
  for (std::size_t i = 0; i < out.flow.size(); ++i) {
    const bool ok = flow.is_valid(i) && induced.is_valid(i);
    out.valid[i] = ok ? 1 : 0;
    out.flow[i] = ok ? Vec2(alpha * flow.flow[i] + (1.0 - alpha) * induced.flow[i])
                     : Vec2(flow.flow[i]);
  }
  return out;
}

BinaryMask backward_inliers_nearest(const FlowField& flow_bwd, const BinaryMask& fwd_inliers) {
  if (!flow_bwd.flow.same_shape(fwd_inliers)) {
    fail(ErrorCode::kDimensionMismatch, "backward flow and inlier mask differ in size");
  }
  BinaryMask out(flow_bwd.width(), flow_bwd.height(), 0);
  for (int y = 0; y < flow_bwd.height(); ++y) {
    for (int x = 0; x < flow_bwd.width(); ++x) {
      const std::size_t i = flow_bwd.flow.index(x, y);
      if (!flow_bwd.is_valid(i)) continue;
      const Vec2 t = Vec2(x, y) + flow_bwd.flow[i];
      if (!t.allFinite()) continue;
      const long xn = std::lround(t.x());
      const long yn = std::lround(t.y());
      if (xn < 0 || yn < 0 || xn >= fwd_inliers.width() || yn >= fwd_inliers.height()) continue;
      out[i] = fwd_inliers(static_cast<int>(xn), static_cast<int>(yn));
    }
  }
  return out;
}

BinaryMask backward_inliers_sampson(const FlowField& flow_bwd, const Mat3& essential,
                                    const CameraIntrinsics& k, double threshold) {
  const Mat3 f = fundamental_from_essential(essential, k);
  BinaryMask out(flow_bwd.width(), flow_bwd.height(), 0);
  for (int y = 0; y < flow_bwd.height(); ++y) {
    for (int x = 0; x < flow_bwd.width(); ++x) {
      const std::size_t i = flow_bwd.flow.index(x, y);
      if (!flow_bwd.is_valid(i)) continue;
      const Vec2 t = Vec2(x, y) + flow_bwd.flow[i];
      if (!t.allFinite() || !k.in_bounds(t.x(), t.y())) continue;
      // The backward pair (source pixel -> reference target) is the forward
      // correspondence (target -> source pixel).
      out[i] = sampson_distance(f, {t.x(), t.y()}, {double(x), double(y)}) < threshold ? 1 : 0;
    }
  }
  return out;
}

WeightMap directional_weights(const FlowField& flow, const ConfidenceMap& conf,
                              const BinaryMask& inliers, double gamma, MaskMode mode) {
  const int w = flow.width(), h = flow.height();
  switch (mode) {
    case MaskMode::kConfRansac:
      return make_weights(conf, build_mask(conf, inliers, gamma, flow.valid));
    case MaskMode::kConf:
      return make_weights(conf, build_mask(conf, BinaryMask(w, h, 1), gamma, flow.valid));
    case MaskMode::kRansac: {
      const BinaryMask m = build_mask(ConfidenceMap(w, h, 1.0), inliers, 0.0, flow.valid);
      return make_weights(ConfidenceMap(w, h, 1.0), m);
    }
    case MaskMode::kNone: {
      BinaryMask m(w, h, 0);
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = flow.valid[i];
      return make_weights(ConfidenceMap(w, h, 1.0), m);
    }
  }
  return WeightMap(w, h, 0.0);
}

DepthMap depth_from_inverse(const DepthMap& inv_depth) {
  DepthMap out(inv_depth.width(), inv_depth.height(), 0.0, false);
  for (std::size_t i = 0; i < inv_depth.depth.size(); ++i) {
    if (inv_depth.is_valid(i) && inv_depth.depth[i] > 0.0) {
      out.depth[i] = 1.0 / inv_depth.depth[i];
      out.valid[i] = 1;
    }
  }
  return out;
}

SfmResult run_pipeline(const PipelineInputs& in, const PipelineConfig& cfg, const GroundTruth* gt) {
  cfg.validate();
  in.camera.validate();
  if (in.flow_fwd == nullptr || in.conf_fwd == nullptr) {
    fail(ErrorCode::kInvalidArgument, "pipeline needs forward flow and confidence");
  }
  const CameraIntrinsics& k = in.camera;
  const bool bidir = cfg.bidirectional && in.flow_bwd != nullptr && in.conf_bwd != nullptr;

  ConfidenceMap conf_fwd = *in.conf_fwd;
  ConfidenceMap conf_bwd = bidir ? *in.conf_bwd : ConfidenceMap();
  if (cfg.confidence.grid_filter) {
    conf_fwd = local_grid_filter(conf_fwd, cfg.confidence.grid_cell, cfg.confidence.grid_quantile);
    if (bidir) {
      conf_bwd = local_grid_filter(conf_bwd, cfg.confidence.grid_cell, cfg.confidence.grid_quantile);
    }
  }

  SfmResult res;
  res.bidirectional = bidir;
  const CorrespondenceSet corr =
      flow_to_correspondences(*in.flow_fwd, conf_fwd, k, cfg.ransac_min_confidence, 1);
  res.ransac = ransac_essential(corr, k, cfg.ransac);
  const BinaryMask inl_fwd = res.ransac.inliers.to_mask(corr, k.width, k.height);

  res.flow_fwd = *in.flow_fwd;
  res.w_fwd = directional_weights(res.flow_fwd, conf_fwd, inl_fwd, cfg.wba.gamma, cfg.mask_mode);
  if (bidir) {
    res.flow_bwd = *in.flow_bwd;
    const BinaryMask inl_bwd =
        cfg.backward_inliers == BackwardInliers::kNearest
            ? backward_inliers_nearest(res.flow_bwd, inl_fwd)
            : backward_inliers_sampson(res.flow_bwd, res.ransac.essential, k, cfg.ransac.threshold);
    res.w_bwd = directional_weights(res.flow_bwd, conf_bwd, inl_bwd, cfg.wba.gamma, cfg.mask_mode);
  }

  auto inputs = [&]() {
    WbaInputs wi;
    wi.camera = k;
    wi.flow_fwd = &res.flow_fwd;
    wi.w_fwd = &res.w_fwd;
    if (bidir) {
      wi.flow_bwd = &res.flow_bwd;
      wi.w_bwd = &res.w_bwd;
    }
    return wi;
  };

  auto record = [&](int iteration, const WbaResult& wr) {
    IterationDiagnostics d;
    d.iteration = iteration;
    d.pose = wr.state.pose;
    d.wba_initial_cost = wr.report.initial_cost;
    d.wba_final_cost = wr.report.final_cost;
    d.wba_iterations = static_cast<int>(wr.report.iterations.size());
    d.wba_converged = wr.report.converged;
    d.weight_sum_fwd = weight_sum(res.w_fwd);
    d.weight_sum_bwd = bidir ? weight_sum(res.w_bwd) : 0.0;
    if (gt != nullptr) {
      if (gt->pose.translation.norm() > 0.0 && wr.state.pose.translation.norm() > 0.0) {
        d.pose_error = pose_error(gt->pose, wr.state.pose);
      }
      if (gt->depth_r) {
        try {
          d.depth_error = depth_metrics(*gt->depth_r, res.depth_r, true);
        } catch (const Error&) {
        }
      }
    }
    res.diagnostics.push_back(d);
  };

  WbaResult current = wba_solve(inputs(), res.ransac.pose, cfg.wba);
  res.pose = current.state.pose;
  res.depth_r = depth_from_inverse(current.state.inv_depth_r);
  if (bidir) res.depth_s = depth_from_inverse(current.state.inv_depth_s);
  record(0, current);

  for (int it = 1; it <= cfg.refine.outer_iterations; ++it) {
    try {
      const FlowField ind_fwd = induced_flow(res.pose, res.depth_r, k);
      WeightMap w_fwd = refine_weights(res.flow_fwd, ind_fwd, res.w_fwd, cfg.refine.sigma);
      FlowField flow_fwd = flow_mixup(res.flow_fwd, ind_fwd, cfg.refine.mixup_alpha);
      WeightMap w_bwd;
      FlowField flow_bwd;
      if (bidir) {
        const FlowField ind_bwd = induced_flow(inverse(res.pose), res.depth_s, k);
        w_bwd = refine_weights(res.flow_bwd, ind_bwd, res.w_bwd, cfg.refine.sigma);
        flow_bwd = flow_mixup(res.flow_bwd, ind_bwd, cfg.refine.mixup_alpha);
      }

      SfmResult next = res;
      next.flow_fwd = std::move(flow_fwd);
      next.w_fwd = std::move(w_fwd);
      if (bidir) {
        next.flow_bwd = std::move(flow_bwd);
        next.w_bwd = std::move(w_bwd);
      }
      WbaInputs wi;
      wi.camera = k;
      wi.flow_fwd = &next.flow_fwd;
      wi.w_fwd = &next.w_fwd;
      if (bidir) {
        wi.flow_bwd = &next.flow_bwd;
        wi.w_bwd = &next.w_bwd;
      }
      WbaResult wr = wba_solve(wi, current.state, cfg.wba);
      next.pose = wr.state.pose;
      next.depth_r = depth_from_inverse(wr.state.inv_depth_r);
      if (bidir) next.depth_s = depth_from_inverse(wr.state.inv_depth_s);
      res = std::move(next);
      current = std::move(wr);
      record(it, current);
    } catch (const Error& e) {
      res.warning = true;
      res.warning_message = "outer iteration " + std::to_string(it) + " failed: " + e.what();
      break;
    }
  }
  return res;
}

}  // namespace dtvsfm
