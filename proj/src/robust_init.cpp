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

#include "dtvsfm/robust_init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "dtvsfm/error.hpp"

namespace dtvsfm {

namespace {

constexpr int kSampleSize = 8;
constexpr double kRankTolerance = 1e-9;
constexpr double kRefitWidening = 5.0;

// Unbiased bounded draw; independent of the standard library's distribution
// implementation so sampling is reproducible across toolchains.
std::size_t draw_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return static_cast<std::size_t>(r % bound);
}

Mat3 hartley_transform(const std::vector<Vec2>& pts, bool& ok) {
  Vec2 centroid = Vec2::Zero();
  for (const Vec2& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const Vec2& p : pts) mean_dist += (p - centroid).norm();
  mean_dist /= static_cast<double>(pts.size());
  ok = mean_dist > 1e-12;
  const double s = ok ? std::sqrt(2.0) / mean_dist : 1.0;
  Mat3 t;
  t << s, 0.0, -s * centroid.x(), 0.0, s, -s * centroid.y(), 0.0, 0.0, 1.0;
  return t;
}

struct Score {
  std::size_t count = 0;
  double total_error = std::numeric_limits<double>::infinity();

  bool better_than(const Score& other) const {
    if (count != other.count) return count > other.count;
    return total_error < other.total_error;
  }
};

Score score_hypothesis(const Mat3& f, const CorrespondenceSet& corr,
                       const std::vector<std::size_t>& subset, double threshold) {
  Score s;
  s.total_error = 0.0;
  for (std::size_t i : subset) {
    const double d = sampson_distance(f, corr[i].ref, corr[i].src);
    if (d < threshold) {
      ++s.count;
      s.total_error += d;
    }
  }
  return s;
}

std::vector<std::size_t> classify(const Mat3& f, const CorrespondenceSet& corr,
                                  const std::vector<std::size_t>& subset, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i : subset) {
    if (sampson_distance(f, corr[i].ref, corr[i].src) < threshold) out.push_back(i);
  }
  return out;
}

}  // namespace

BinaryMask InlierSet::to_mask(const CorrespondenceSet& corr, int width, int height) const {
  BinaryMask mask(width, height, 0);
  for (std::size_t i : indices) {
    const Correspondence& c = corr[i];
    if (mask.contains(c.x, c.y)) mask(c.x, c.y) = 1;
  }
  return mask;
}

void RansacConfig::validate() const {
  if (!(threshold > 0.0)) fail(ErrorCode::kInvalidArgument, "ransac threshold must be > 0");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "ransac confidence must lie in (0, 1)");
  }
  if (max_iterations < 1) fail(ErrorCode::kInvalidArgument, "ransac max_iterations must be >= 1");
  if (subsample_stride < 1) fail(ErrorCode::kInvalidArgument, "ransac stride must be >= 1");
  if (refit_rounds < 0) fail(ErrorCode::kInvalidArgument, "ransac refit_rounds must be >= 0");
}

CorrespondenceSet flow_to_correspondences(const FlowField& flow, const ConfidenceMap& conf,
                                          const CameraIntrinsics& k, double min_conf,
                                          int stride) {
  if (stride < 1) fail(ErrorCode::kInvalidArgument, "correspondence stride must be >= 1");
  if (!flow.flow.same_shape(conf)) {
    fail(ErrorCode::kDimensionMismatch, "flow and confidence differ in size");
  }
  CorrespondenceSet out;
  for (int y = 0; y < flow.height(); y += stride) {
    for (int x = 0; x < flow.width(); x += stride) {
      const std::size_t i = flow.flow.index(x, y);
      if (!flow.is_valid(i) || conf[i] < min_conf) continue;
      const Vec2 target = Vec2(x, y) + flow.flow[i];
      if (!target.allFinite() || !k.in_bounds(target.x(), target.y())) continue;
      out.push_back({{double(x), double(y)}, {target.x(), target.y()}, x, y});
    }
  }
  return out;
}

Mat3 essential_from_pose(const PoseSE3& pose) { return hat(pose.translation) * pose.rotation; }

Mat3 fundamental_from_essential(const Mat3& e, const CameraIntrinsics& k) {
  const Mat3 k_inv = k.matrix().inverse();
  return k_inv.transpose() * e * k_inv;
}

namespace {
// Squared epipolar-gradient norm; the algebraic residual divided by its square
// root is the Sampson distance.
double sampson_denominator(const Mat3& f, const PixelCoord& ref, const PixelCoord& src) {
  const Vec3 fx1 = f * Vec3(ref.u, ref.v, 1.0);
  const Vec3 ftx2 = f.transpose() * Vec3(src.u, src.v, 1.0);
  const double den = fx1.head<2>().squaredNorm() + ftx2.head<2>().squaredNorm();
  return den > 1e-300 ? den : 1e-300;
}
}  // namespace

double sampson_distance(const Mat3& f, const PixelCoord& ref, const PixelCoord& src) {
  const Vec3 x1(ref.u, ref.v, 1.0);
  const Vec3 x2(src.u, src.v, 1.0);
  const Vec3 fx1 = f * x1;
  const Vec3 ftx2 = f.transpose() * x2;
  const double num = x2.dot(fx1);
  const double den = fx1.x() * fx1.x() + fx1.y() * fx1.y() + ftx2.x() * ftx2.x() +
                     ftx2.y() * ftx2.y();
  if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
  return std::abs(num) / std::sqrt(den);
}

bool eight_point_essential(const std::vector<Vec2>& ref_xy, const std::vector<Vec2>& src_xy,
                           Mat3& essential, const std::vector<double>* weights) {
  const std::size_t n = ref_xy.size();
  if (n < static_cast<std::size_t>(kSampleSize) || src_xy.size() != n) return false;
  if (weights != nullptr && weights->size() != n) return false;
  bool ok1 = false, ok2 = false;
  const Mat3 t1 = hartley_transform(ref_xy, ok1);
  const Mat3 t2 = hartley_transform(src_xy, ok2);
  if (!ok1 || !ok2) return false;

  Eigen::MatrixXd a(static_cast<Eigen::Index>(std::max<std::size_t>(n, 9)), 9);
  a.setZero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 p1 = t1 * Vec3(ref_xy[i].x(), ref_xy[i].y(), 1.0);
    const Vec3 p2 = t2 * Vec3(src_xy[i].x(), src_xy[i].y(), 1.0);
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = p2.x() * p1.x();
    a(r, 1) = p2.x() * p1.y();
    a(r, 2) = p2.x();
    a(r, 3) = p2.y() * p1.x();
    a(r, 4) = p2.y() * p1.y();
    a(r, 5) = p2.y();
    a(r, 6) = p1.x();
    a(r, 7) = p1.y();
    a(r, 8) = 1.0;
    if (weights != nullptr) a.row(r) *= std::sqrt((*weights)[i]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(7) / sv(0) < kRankTolerance) return false;
  const Eigen::VectorXd e = svd.matrixV().col(8);
  Mat3 en;
  en << e(0), e(1), e(2), e(3), e(4), e(5), e(6), e(7), e(8);
  const Mat3 raw = t2.transpose() * en * t1;

  Eigen::JacobiSVD<Mat3> esvd(raw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 s(1.0, 1.0, 0.0);
  essential = esvd.matrixU() * s.asDiagonal() * esvd.matrixV().transpose();
  return essential.allFinite();
}

bool triangulates_in_front(const PoseSE3& pose, const Vec2& ref_xy, const Vec2& src_xy) {
  const Vec3 f1(ref_xy.x(), ref_xy.y(), 1.0);
  const Vec3 f2(src_xy.x(), src_xy.y(), 1.0);
  // lambda2 * f2 = lambda1 * R f1 + t, least squares in (lambda1, lambda2).
  Eigen::Matrix<double, 3, 2> a;
  a.col(0) = pose.rotation * f1;
  a.col(1) = -f2;
  const Eigen::Matrix2d ata = a.transpose() * a;
  const double det = ata.determinant();
  if (!(std::abs(det) > 1e-14)) return false;
  const Eigen::Vector2d lambda = ata.inverse() * (a.transpose() * -pose.translation);
  return lambda(0) > 0.0 && lambda(1) > 0.0;
}

PoseSE3 decompose_essential(const Mat3& e, const std::vector<Vec2>& ref_xy,
                            const std::vector<Vec2>& src_xy, int* in_front_count) {
  Eigen::JacobiSVD<Mat3> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  Mat3 v = svd.matrixV();
  if (u.determinant() < 0.0) u = -u;
  if (v.determinant() < 0.0) v = -v;
  Mat3 w;
  w << 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0;
  const Mat3 r1 = nearest_rotation(u * w * v.transpose());
  const Mat3 r2 = nearest_rotation(u * w.transpose() * v.transpose());
  const Vec3 t = u.col(2).normalized();
  const PoseSE3 candidates[4] = {{r1, t}, {r1, -t}, {r2, t}, {r2, -t}};

  int best = -1;
  int best_count = -1;
  for (int c = 0; c < 4; ++c) {
    int count = 0;
    for (std::size_t i = 0; i < ref_xy.size(); ++i) {
      if (triangulates_in_front(candidates[c], ref_xy[i], src_xy[i])) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best = c;
    }
  }
  if (in_front_count != nullptr) *in_front_count = best_count;
  return candidates[best];
}

RansacResult ransac_essential(const CorrespondenceSet& corr, const CameraIntrinsics& k,
                              const RansacConfig& cfg) {
  cfg.validate();
  k.validate();
  if (corr.size() < static_cast<std::size_t>(kSampleSize)) {
    fail(ErrorCode::kInsufficientMatches,
         "ransac_essential needs at least 8 correspondences, got " + std::to_string(corr.size()));
  }

  std::vector<Vec2> ref_xy(corr.size()), src_xy(corr.size());
  for (std::size_t i = 0; i < corr.size(); ++i) {
    ref_xy[i] = k.bearing(corr[i].ref.u, corr[i].ref.v).head<2>();
    src_xy[i] = k.bearing(corr[i].src.u, corr[i].src.v).head<2>();
  }

  std::vector<std::size_t> subset;
  const int s = cfg.subsample_stride;
  for (std::size_t i = 0; i < corr.size(); ++i) {
    if (corr[i].x % s == 0 && corr[i].y % s == 0) subset.push_back(i);
  }
  if (subset.size() < static_cast<std::size_t>(kSampleSize)) {
    subset.resize(corr.size());
    for (std::size_t i = 0; i < corr.size(); ++i) subset[i] = i;
  }

  std::mt19937_64 rng(cfg.rng_seed);
  std::vector<Vec2> sample_ref(kSampleSize), sample_src(kSampleSize);
  std::size_t picks[kSampleSize];

  // Least-squares refit on the inliers of `e` over `pool`; keeps the refit
  // only while it improves the score on that pool.
  auto local_refit = [&](Mat3& e, Score& score, const std::vector<std::size_t>& pool) {
    const int rounds = std::max(cfg.refit_rounds, 0);
    for (int round = 0; round < rounds; ++round) {
      // Fit band widens to kRefitWidening * threshold and shrinks back.
      const double widen =
          rounds == 1 ? 1.0 : 1.0 + (kRefitWidening - 1.0) * (rounds - 1 - round) / (rounds - 1);
      const Mat3 f_cur = fundamental_from_essential(e, k);
      const std::vector<std::size_t> inl = classify(f_cur, corr, pool, widen * cfg.threshold);
      if (inl.size() < static_cast<std::size_t>(kSampleSize)) break;
      std::vector<Vec2> rr, ss;
      std::vector<double> w;
      rr.reserve(inl.size());
      ss.reserve(inl.size());
      w.reserve(inl.size());
      for (std::size_t i : inl) {
        rr.push_back(ref_xy[i]);
        ss.push_back(src_xy[i]);
        w.push_back(1.0 / sampson_denominator(f_cur, corr[i].ref, corr[i].src));
      }
      Mat3 refit;
      if (!eight_point_essential(rr, ss, refit, &w)) break;
      const Score sc = score_hypothesis(fundamental_from_essential(refit, k), corr, pool,
                                        cfg.threshold);
      if (sc.better_than(score)) {
        score = sc;
        e = refit;
      }
    }
  };

  Score best;
  best.count = 0;
  Mat3 best_e = Mat3::Zero();
  bool found = false;
  int needed = cfg.max_iterations;
  int it = 0;
  for (; it < needed; ++it) {
    for (int j = 0; j < kSampleSize; ++j) {
      bool fresh;
      do {
        picks[j] = subset[draw_index(rng, subset.size())];
        fresh = std::find(picks, picks + j, picks[j]) == picks + j;
      } while (!fresh);
      sample_ref[j] = ref_xy[picks[j]];
      sample_src[j] = src_xy[picks[j]];
    }
    Mat3 e;
    if (!eight_point_essential(sample_ref, sample_src, e)) continue;
    Score sc = score_hypothesis(fundamental_from_essential(e, k), corr, subset, cfg.threshold);
    if (!found || sc.better_than(best)) {
      local_refit(e, sc, subset);
      found = true;
      best = sc;
      best_e = e;
      const double w = static_cast<double>(best.count) / static_cast<double>(subset.size());
      const double p_good = std::pow(w, kSampleSize);
      if (p_good >= 1.0) {
        needed = it + 1;
      } else if (p_good > 0.0) {
        const double n = std::log(1.0 - cfg.confidence) / std::log1p(-p_good);
        if (n < static_cast<double>(cfg.max_iterations)) {
          needed = std::max(it + 1, static_cast<int>(std::ceil(n)));
        }
      }
    }
  }
  if (!found) {
    fail(ErrorCode::kDegenerateGeometry,
         "every minimal sample was rank deficient (no parallax or degenerate flow)");
  }

  // Final polish over every correspondence.
  std::vector<std::size_t> all(corr.size());
  for (std::size_t i = 0; i < corr.size(); ++i) all[i] = i;
  Score full = score_hypothesis(fundamental_from_essential(best_e, k), corr, all, cfg.threshold);
  local_refit(best_e, full, all);
  const std::vector<std::size_t> inl =
      classify(fundamental_from_essential(best_e, k), corr, all, cfg.threshold);
  std::vector<Vec2> rr, ss;
  for (std::size_t i : inl) {
    rr.push_back(ref_xy[i]);
    ss.push_back(src_xy[i]);
  }
  RansacResult out;
  out.pose = decompose_essential(best_e, rr, ss);
  out.essential = essential_from_pose(out.pose);
  out.iterations = it;
  out.inliers.indices = classify(fundamental_from_essential(out.essential, k), corr, all,
                                 cfg.threshold);
  return out;
}

}  // namespace dtvsfm
