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

#include "dtvsfm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "dtvsfm/error.hpp"

namespace dtvsfm {

namespace {

// Stream identifiers for the counter-based generator.
enum Stream : std::uint64_t {
  kAxis = 1,
  kTranslation,
  kLattice,
  kPlanes,
  kNoiseFwd,
  kNoiseBwd,
  kOutlierPickFwd,
  kOutlierPickBwd,
  kOutlierTargetFwd,
  kOutlierTargetBwd,
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Vec3 random_unit(std::uint64_t seed, std::uint64_t stream) {
  // Normalized Gaussian triple.
  Vec3 v(gaussian_stream(seed, stream, 0), gaussian_stream(seed, stream, 1),
         gaussian_stream(seed, stream, 2));
  if (v.norm() < 1e-12) v = Vec3::UnitX();
  return v.normalized();
}

double lattice_value(std::uint64_t seed, int octave, int ix, int iy) {
  const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
                            static_cast<std::uint32_t>(iy);
  return 2.0 * uniform_stream(seed ^ (static_cast<std::uint64_t>(octave) * 0x51ed2701ULL),
                              kLattice, key) - 1.0;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(std::uint64_t seed, int octave, double x, double y) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int ix = static_cast<int>(fx);
  const int iy = static_cast<int>(fy);
  const double tx = smooth(x - fx);
  const double ty = smooth(y - fy);
  const double v00 = lattice_value(seed, octave, ix, iy);
  const double v10 = lattice_value(seed, octave, ix + 1, iy);
  const double v01 = lattice_value(seed, octave, ix, iy + 1);
  const double v11 = lattice_value(seed, octave, ix + 1, iy + 1);
  const double a = v00 + tx * (v10 - v00);
  const double b = v01 + tx * (v11 - v01);
  return a + ty * (b - a);
}

DepthMap reference_depth(const SceneConfig& cfg, const CameraIntrinsics& k) {
  const DepthModel& m = cfg.depth;
  DepthMap z(cfg.width, cfg.height, m.base_depth, true);
  const int width = cfg.width;
  const int height = cfg.height;
  switch (m.kind) {
    case DepthModelKind::kConstant:
      break;
    case DepthModelKind::kSlantedPlane: {
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          const Vec3 f = k.bearing(x, y);
          const double inv = (1.0 + m.slope_x * f.x() + m.slope_y * f.y()) / m.base_depth;
          z.depth(x, y) = 1.0 / std::max(inv, 0.05 / m.base_depth);
        }
      }
      break;
    }
    case DepthModelKind::kMultiPlane: {
      for (int p = 0; p < m.planes; ++p) {
        const auto u = [&](int j) { return uniform_stream(cfg.rng_seed, kPlanes, 8 * p + j); };
        const double rw = (0.2 + 0.2 * u(0)) * width;
        const double rh = (0.2 + 0.2 * u(1)) * height;
        const double x0 = u(2) * (width - rw);
        const double y0 = u(3) * (height - rh);
        const double depth = m.base_depth * (0.5 + 0.3 * u(4));
        for (int y = 0; y < height; ++y) {
          for (int x = 0; x < width; ++x) {
            if (x >= x0 && x <= x0 + rw && y >= y0 && y <= y0 + rh) {
              z.depth(x, y) = std::min(z.depth(x, y), depth);
            }
          }
        }
      }
      break;
    }
    case DepthModelKind::kFractalPerlin: {
      const double spacing =
          m.feature_pixels > 0.0 ? m.feature_pixels : std::max(width, height) / 4.0;
#pragma omp parallel for schedule(static)
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          double sum = 0.0;
          double norm = 0.0;
          double amp = 1.0;
          double freq = 1.0 / spacing;
          for (int o = 0; o < m.octaves; ++o) {
            sum += amp * value_noise(cfg.rng_seed, o, x * freq, y * freq);
            norm += amp;
            amp *= 0.5;
            freq *= 2.0;
          }
          const double n = norm > 0.0 ? sum / norm : 0.0;
          z.depth(x, y) = std::max(m.base_depth + m.amplitude * n, 0.1 * m.base_depth);
        }
      }
      break;
    }
  }
  return z;
}

struct ZBufferCell {
  double inv_depth = 0.0;  // 0 = empty
  double depth = 0.0;
};

// Rasterizes the reference surface into the source camera.
DepthMap warp_depth(const DepthMap& z_r, const PoseSE3& pose, const CameraIntrinsics& k) {
  constexpr double kDiscontinuity = 1.15;
  constexpr double kSnap = 1e-7;
  const int width = k.width;
  const int height = k.height;
  std::vector<Vec2> proj(z_r.depth.size());
  std::vector<double> zs(z_r.depth.size());
  std::vector<std::uint8_t> ok(z_r.depth.size(), 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = z_r.depth.index(x, y);
      if (!z_r.is_valid(i)) continue;
      const Vec3 p = pose * (z_r.depth[i] * k.bearing(x, y));
      if (!(p.z() > kMinPointDepth)) continue;
      proj[i] = k.project(p);
      zs[i] = p.z();
      ok[i] = 1;
    }
  }

  Grid<ZBufferCell> buffer(width, height);
  auto raster = [&](std::size_t a, std::size_t b, std::size_t c) {
    const Vec2& pa = proj[a];
    const Vec2& pb = proj[b];
    const Vec2& pc = proj[c];
    const double area = (pb - pa).x() * (pc - pa).y() - (pb - pa).y() * (pc - pa).x();
    if (std::abs(area) < 1e-12) return;
    const int x0 = std::max(0, static_cast<int>(std::ceil(std::min({pa.x(), pb.x(), pc.x()}) - kSnap)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(std::max({pa.x(), pb.x(), pc.x()}) + kSnap)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(std::min({pa.y(), pb.y(), pc.y()}) - kSnap)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor(std::max({pa.y(), pb.y(), pc.y()}) + kSnap)));
    const std::size_t verts[3] = {a, b, c};
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Vec2 p(x, y);
        double inv = 0.0;
        double depth = 0.0;
        bool snapped = false;
        for (std::size_t v : verts) {
          if ((proj[v] - p).cwiseAbs().maxCoeff() < kSnap) {
            depth = zs[v];
            inv = 1.0 / depth;
            snapped = true;
            break;
          }
        }
        if (!snapped) {
          const double la = ((pb - p).x() * (pc - p).y() - (pb - p).y() * (pc - p).x()) / area;
          const double lb = ((pc - p).x() * (pa - p).y() - (pc - p).y() * (pa - p).x()) / area;
          const double lc = 1.0 - la - lb;
          if (la < -1e-9 || lb < -1e-9 || lc < -1e-9) continue;
          // Inverse depth is affine in screen space on a planar facet.
          inv = la / zs[a] + lb / zs[b] + lc / zs[c];
          if (!(inv > 0.0)) continue;
          depth = 1.0 / inv;
        }
        ZBufferCell& cell = buffer(x, y);
        if (inv > cell.inv_depth) cell = {inv, depth};
      }
    }
  };

  for (int y = 0; y + 1 < height; ++y) {
    for (int x = 0; x + 1 < width; ++x) {
      const std::size_t i00 = z_r.depth.index(x, y);
      const std::size_t i10 = z_r.depth.index(x + 1, y);
      const std::size_t i01 = z_r.depth.index(x, y + 1);
      const std::size_t i11 = z_r.depth.index(x + 1, y + 1);
      if (!ok[i00] || !ok[i10] || !ok[i01] || !ok[i11]) continue;
      const double zmin = std::min({z_r.depth[i00], z_r.depth[i10], z_r.depth[i01], z_r.depth[i11]});
      const double zmax = std::max({z_r.depth[i00], z_r.depth[i10], z_r.depth[i01], z_r.depth[i11]});
      if (zmax > kDiscontinuity * zmin) continue;
      raster(i00, i10, i11);
      raster(i00, i11, i01);
    }
  }

  // Vertices landing exactly on a pixel center are visible even when every
  // adjacent quad was dropped at a discontinuity.
  for (std::size_t i = 0; i < proj.size(); ++i) {
    if (!ok[i]) continue;
    const double xr = std::round(proj[i].x()), yr = std::round(proj[i].y());
    if (std::abs(proj[i].x() - xr) >= kSnap || std::abs(proj[i].y() - yr) >= kSnap) continue;
    const int xn = static_cast<int>(xr), yn = static_cast<int>(yr);
    if (!buffer.contains(xn, yn)) continue;
    ZBufferCell& cell = buffer(xn, yn);
    if (1.0 / zs[i] > cell.inv_depth) cell = {1.0 / zs[i], zs[i]};
  }

  DepthMap out(width, height, 0.0, false);
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    if (buffer[i].inv_depth > 0.0) {
      out.depth[i] = buffer[i].depth;
      out.valid[i] = 1;
    }
  }
  return out;
}

// Depth of the source surface at a sub-pixel location; NaN when unknown.
double sample_inverse_depth(const DepthMap& z, double u, double v) {
  const int x0 = static_cast<int>(std::floor(u));
  const int y0 = static_cast<int>(std::floor(v));
  if (z.depth.contains(x0, y0) && z.depth.contains(x0 + 1, y0 + 1)) {
    const std::size_t i00 = z.depth.index(x0, y0), i10 = z.depth.index(x0 + 1, y0);
    const std::size_t i01 = z.depth.index(x0, y0 + 1), i11 = z.depth.index(x0 + 1, y0 + 1);
    if (z.is_valid(i00) && z.is_valid(i10) && z.is_valid(i01) && z.is_valid(i11)) {
      const double tx = u - x0, ty = v - y0;
      const double a = (1 - tx) / z.depth[i00] + tx / z.depth[i10];
      const double b = (1 - tx) / z.depth[i01] + tx / z.depth[i11];
      return (1 - ty) * a + ty * b;
    }
  }
  const int xn = static_cast<int>(std::lround(u));
  const int yn = static_cast<int>(std::lround(v));
  if (z.depth.contains(xn, yn) && z.valid(xn, yn)) return 1.0 / z.depth(xn, yn);
  return std::numeric_limits<double>::quiet_NaN();
}

void invalidate_occluded(FlowField& fwd, const DepthMap& z_r, const DepthMap& z_s,
                         const PoseSE3& pose, const CameraIntrinsics& k) {
  constexpr double kOcclusionTolerance = 0.05;
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      const std::size_t i = fwd.flow.index(x, y);
      if (!fwd.is_valid(i)) continue;
      const Vec3 p = pose * (z_r.depth[i] * k.bearing(x, y));
      const Vec2 q = k.project(p);
      const double inv_surface = sample_inverse_depth(z_s, q.x(), q.y());
      if (std::isnan(inv_surface)) continue;
      // Occluded when a surface sits clearly in front of the point.
      if (inv_surface > (1.0 + kOcclusionTolerance) / p.z()) fwd.valid[i] = 0;
    }
  }
}

void corrupt(FlowField& flow, BinaryMask& outliers, const CorruptionConfig& cfg,
             std::uint64_t noise_stream, std::uint64_t pick_stream,
             std::uint64_t target_stream) {
  const int width = flow.width();
  const int height = flow.height();
  outliers = BinaryMask(width, height, 0);
  if (cfg.noise_sigma > 0.0) {
    const auto n = static_cast<std::ptrdiff_t>(flow.flow.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const auto i = static_cast<std::size_t>(j);
      if (!flow.is_valid(i)) continue;
      flow.flow[i] += cfg.noise_sigma * Vec2(gaussian_stream(cfg.rng_seed, noise_stream, 2 * i),
                                             gaussian_stream(cfg.rng_seed, noise_stream, 2 * i + 1));
    }
  }
  struct Keyed {
    std::uint64_t key;
    std::size_t index;
  };
  std::vector<Keyed> valid;
  for (std::size_t i = 0; i < flow.flow.size(); ++i) {
    if (flow.is_valid(i)) valid.push_back({hash_stream(cfg.rng_seed, pick_stream, i), i});
  }
  const auto count = static_cast<std::size_t>(
      std::floor(cfg.outlier_rate * static_cast<double>(valid.size())));
  std::sort(valid.begin(), valid.end(), [](const Keyed& a, const Keyed& b) {
    return a.key != b.key ? a.key < b.key : a.index < b.index;
  });
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t i = valid[j].index;
    const int x = static_cast<int>(i % static_cast<std::size_t>(width));
    const int y = static_cast<int>(i / static_cast<std::size_t>(width));
    const Vec2 target(uniform_stream(cfg.rng_seed, target_stream, 2 * i) * (width - 1),
                      uniform_stream(cfg.rng_seed, target_stream, 2 * i + 1) * (height - 1));
    flow.flow[i] = target - Vec2(x, y);
    outliers[i] = 1;
  }
}

ConfidenceMap make_confidence(const FlowField& flow, const BinaryMask& outliers,
                              const CorruptionConfig& cfg) {
  ConfidenceMap c(flow.width(), flow.height(), 0.0);
  const double w = flow.width(), h = flow.height();
  const double outlier_var = (w * w + h * h) / 12.0;
  const double inlier_var = std::max(cfg.noise_sigma * cfg.noise_sigma, 1e-12);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!flow.is_valid(i)) continue;
    switch (cfg.confidence_model) {
      case ConfidenceModel::kOracle:
        c[i] = outliers[i] ? 0.0 : cfg.oracle_scale;
        break;
      case ConfidenceModel::kCalibrated: {
        PixelMixture m;
        m.components = {{1.0, outliers[i] ? outlier_var : inlier_var}};
        c[i] = disc_mass(m, cfg.confidence_radius);
        break;
      }
      case ConfidenceModel::kConstant:
        c[i] = cfg.constant_confidence;
        break;
    }
  }
  return c;
}

}  // namespace

std::uint64_t hash_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ index);
}

double uniform_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return static_cast<double>(hash_stream(seed, stream, index) >> 11) * 0x1.0p-53;
}

double gaussian_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  // Box-Muller on two sub-streams of the same counter.
  const double u1 = (static_cast<double>(hash_stream(seed, stream, 2 * index) >> 11) + 1.0) *
                    0x1.0p-53;
  const double u2 = uniform_stream(seed, stream, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void SceneConfig::validate() const {
  if (width < 2 || height < 2) fail(ErrorCode::kConfigError, "scene size must be >= 2x2");
  if (focal < 0.0) fail(ErrorCode::kConfigError, "scene focal must be >= 0");
  if (!(depth.base_depth > 0.0)) fail(ErrorCode::kConfigError, "base depth must be positive");
  if (depth.amplitude < 0.0 || depth.octaves < 1 || depth.planes < 0) {
    fail(ErrorCode::kConfigError, "invalid depth model parameters");
  }
  if (!(std::abs(pose.rotation_deg) < 60.0)) {
    fail(ErrorCode::kConfigError, "rotation magnitude must be below 60 degrees");
  }
  if (pose.translation < 0.0) fail(ErrorCode::kConfigError, "translation must be >= 0");
}

void CorruptionConfig::validate() const {
  if (!(noise_sigma >= 0.0)) fail(ErrorCode::kConfigError, "noise_sigma must be >= 0");
  if (!(outlier_rate >= 0.0 && outlier_rate <= 1.0)) {
    fail(ErrorCode::kConfigError, "outlier_rate must lie in [0, 1]");
  }
  if (!(oracle_scale >= 0.0 && oracle_scale <= 1.0) ||
      !(constant_confidence >= 0.0 && constant_confidence <= 1.0)) {
    fail(ErrorCode::kConfigError, "confidence values must lie in [0, 1]");
  }
  if (!(confidence_radius > 0.0)) fail(ErrorCode::kConfigError, "confidence radius must be > 0");
}

SyntheticScene generate_scene(const SceneConfig& cfg) {
  cfg.validate();
  SyntheticScene scene;
  CameraIntrinsics& k = scene.camera;
  k.width = cfg.width;
  k.height = cfg.height;
  k.fx = k.fy = cfg.focal > 0.0 ? cfg.focal : static_cast<double>(cfg.width);
  k.cx = 0.5 * (cfg.width - 1);
  k.cy = 0.5 * (cfg.height - 1);

  const Vec3 axis = cfg.pose.rotation_axis.norm() > 0.0 ? cfg.pose.rotation_axis.normalized()
                                                        : random_unit(cfg.rng_seed, kAxis);
  Vec3 dir = cfg.pose.translation_dir;
  if (!(dir.norm() > 0.0)) {
    dir = random_unit(cfg.rng_seed, kTranslation);
    dir.z() = std::clamp(dir.z(), -0.3, 0.3);
  }
  Twist rot;
  rot.omega = axis * (cfg.pose.rotation_deg * std::numbers::pi / 180.0);
  scene.gt_pose.rotation = se3_exp(rot).rotation;
  scene.gt_pose.translation = cfg.pose.translation * dir.normalized();

  scene.gt_depth_r = reference_depth(cfg, k);
  scene.gt_depth_s = warp_depth(scene.gt_depth_r, scene.gt_pose, k);
  return scene;
}

RenderedFlow render_flow(const SyntheticScene& scene, const CorruptionConfig& cfg) {
  cfg.validate();
  RenderedFlow out;
  const CameraIntrinsics& k = scene.camera;
  out.clean_fwd = induced_flow(scene.gt_pose, scene.gt_depth_r, k);
  invalidate_occluded(out.clean_fwd, scene.gt_depth_r, scene.gt_depth_s, scene.gt_pose, k);
  out.clean_bwd = induced_flow(inverse(scene.gt_pose), scene.gt_depth_s, k);

  out.fwd = out.clean_fwd;
  out.bwd = out.clean_bwd;
  corrupt(out.fwd, out.outliers_fwd, cfg, kNoiseFwd, kOutlierPickFwd, kOutlierTargetFwd);
  corrupt(out.bwd, out.outliers_bwd, cfg, kNoiseBwd, kOutlierPickBwd, kOutlierTargetBwd);
  out.conf_fwd = make_confidence(out.fwd, out.outliers_fwd, cfg);
  out.conf_bwd = make_confidence(out.bwd, out.outliers_bwd, cfg);
  return out;
}

}  // namespace dtvsfm
