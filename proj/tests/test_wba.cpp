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


#include <gtest/gtest.h>

#include <omp.h>

#include <Eigen/Dense>
#include <random>

#include "dtvsfm/error.hpp"
#include "dtvsfm/metrics.hpp"
#include "dtvsfm/refine.hpp"
#include "dtvsfm/robust_init.hpp"
#include "dtvsfm/synth.hpp"
#include "dtvsfm/wba.hpp"
#include "test_util.hpp"

namespace dtvsfm {
namespace {

WeightMap valid_weights(const FlowField& flow) {
  WeightMap w(flow.width(), flow.height(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = flow.is_valid(i) ? 1.0 : 0.0;
  return w;
}

DepthMap inverse_of(const DepthMap& z) {
  DepthMap d = z;
  for (std::size_t i = 0; i < d.depth.size(); ++i) {
    if (d.is_valid(i)) d.depth[i] = 1.0 / z.depth[i];
  }
  return d;
}

struct Problem {
  SyntheticScene scene;
  RenderedFlow flow;
  WeightMap w_fwd, w_bwd;

  WbaInputs inputs(bool bidirectional = true) const {
    WbaInputs in;
    in.camera = scene.camera;
    in.flow_fwd = &flow.fwd;
    in.w_fwd = &w_fwd;
    if (bidirectional) {
      in.flow_bwd = &flow.bwd;
      in.w_bwd = &w_bwd;
    }
    return in;
  }
};

Problem make_problem(std::uint64_t seed, int width, double noise = 0.0) {
  Problem p;
  p.scene = generate_scene(test::scene_config(seed, width));
  CorruptionConfig cc;
  cc.noise_sigma = noise;
  cc.rng_seed = seed + 100;
  p.flow = render_flow(p.scene, cc);
  p.w_fwd = valid_weights(p.flow.fwd);
  p.w_bwd = valid_weights(p.flow.bwd);
  return p;
}

PoseSE3 ransac_init_from(const FlowField& flow, const CameraIntrinsics& k) {
  const CorrespondenceSet corr = flow_to_correspondences(
      flow, ConfidenceMap(flow.width(), flow.height(), 1.0), k, 0.0, 1);
  return ransac_essential(corr, k, RansacConfig{}).pose;
}

PoseSE3 ransac_init(const Problem& p) { return ransac_init_from(p.flow.fwd, p.scene.camera); }

// Induced pixel as a function of the left twist and inverse depth.
Vec2 induced_fwd(const PoseSE3& pose, double d, int x, int y, const CameraIntrinsics& k) {
  return k.project(pose * (k.bearing(x, y) / d));
}
Vec2 induced_bwd(const PoseSE3& pose, double d, int x, int y, const CameraIntrinsics& k) {
  return k.project(inverse(pose) * (k.bearing(x, y) / d));
}

TEST(Wba, EnergyZeroAtGroundTruth) {
  const Problem p = make_problem(1, 48);
  const double e = wba_energy(p.scene.gt_pose, p.scene.gt_depth_r, p.scene.gt_depth_s,
                              p.flow.clean_fwd, p.flow.clean_bwd, p.w_fwd, p.w_bwd,
                              p.scene.camera);
  EXPECT_LT(e, 1e-12);
}

TEST(Wba, EnergyZeroWithZeroWeights) {
  const Problem p = make_problem(2, 32);
  const WeightMap zero(32, 24, 0.0);
  std::mt19937_64 rng(1);
  const PoseSE3 pose = test::random_pose(rng, 0.3, 1.0);
  EXPECT_EQ(wba_energy(pose, p.scene.gt_depth_r, p.scene.gt_depth_s, p.flow.fwd, p.flow.bwd,
                       zero, zero, p.scene.camera),
            0.0);
}

TEST(Wba, EnergySinglePixelResidual) {
  const CameraIntrinsics k = test::camera(5, 5);
  FlowField flow(5, 5);
  flow.flow(2, 3) = Vec2(3.0, 4.0);
  WeightMap w(5, 5, 0.0);
  w(2, 3) = 1.0;
  const DepthMap z(5, 5, 2.0);
  const double e = wba_energy(PoseSE3::identity(), z, z, flow, FlowField(), w, WeightMap(), k);
  EXPECT_DOUBLE_EQ(e, 25.0);
}

TEST(Wba, EnergyDimensionMismatch) {
  const CameraIntrinsics k = test::camera(5, 5);
  const FlowField flow(5, 5);
  const WeightMap w(4, 5, 1.0);
  const DepthMap z(5, 5, 2.0);
  EXPECT_THROW(wba_energy(PoseSE3::identity(), z, z, flow, FlowField(), w, WeightMap(), k),
               Error);
}

TEST(Wba, JacobiansMatchCentralDifferences) {
  const CameraIntrinsics k = test::camera(64, 48);
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> ux(0, 63), uy(0, 47);
  std::uniform_real_distribution<double> ud(0.1, 0.6);
  const double eps = 1e-6;
  double worst = 0.0;
  int checked = 0;
  while (checked < 100) {
    const PoseSE3 pose = test::random_pose(rng, 0.3, 1.0);
    const int x = ux(rng), y = uy(rng);
    const double d = ud(rng);
    for (int dir = 0; dir < 2; ++dir) {
      const auto lin = dir == 0 ? linearize_forward_pixel(pose, d, x, y, Vec2::Zero(), k)
                                : linearize_backward_pixel(pose, d, x, y, Vec2::Zero(), k);
      if (!lin.valid) continue;
      auto f = [&](const PoseSE3& t, double dd) {
        return dir == 0 ? induced_fwd(t, dd, x, y, k) : induced_bwd(t, dd, x, y, k);
      };
      Eigen::Matrix<double, 2, 7> fd, an;
      for (int j = 0; j < 6; ++j) {
        Vec6 e = Vec6::Zero();
        e(j) = eps;
        fd.col(j) = (f(retract(Twist::from_vector(e), pose), d) -
                     f(retract(Twist::from_vector(-e), pose), d)) / (2.0 * eps);
      }
      fd.col(6) = (f(pose, d + eps) - f(pose, d - eps)) / (2.0 * eps);
      an.leftCols<6>() = lin.j_pose;
      an.col(6) = lin.j_depth;
      worst = std::max(worst, (an - fd).norm() / fd.norm());
      // The residual is p + flow - induced.
      EXPECT_LT((lin.residual - (Vec2(x, y) - f(pose, d))).norm(), 1e-9);
    }
    ++checked;
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Wba, PureRotationHasZeroDepthJacobian) {
  const CameraIntrinsics k = test::camera(16, 12);
  std::mt19937_64 rng(8);
  PoseSE3 pose = test::random_pose(rng, 0.5, 1.0);
  pose.translation.setZero();
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 16; ++x) {
      EXPECT_EQ(linearize_forward_pixel(pose, 0.5, x, y, Vec2::Zero(), k).j_depth.norm(), 0.0);
      EXPECT_EQ(linearize_backward_pixel(pose, 0.5, x, y, Vec2::Zero(), k).j_depth.norm(), 0.0);
    }
  }
}

struct SmallProblem {
  CameraIntrinsics k;
  FlowField fwd, bwd;
  WeightMap w_fwd, w_bwd;
  WbaState state;

  WbaInputs inputs() const {
    WbaInputs in;
    in.camera = k;
    in.flow_fwd = &fwd;
    in.w_fwd = &w_fwd;
    in.flow_bwd = &bwd;
    in.w_bwd = &w_bwd;
    return in;
  }
};

// <= 50 active pixels over both directions with random flow, weights and depths.
SmallProblem make_small(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SmallProblem s;
  s.k = test::camera(6, 4, 8.0);
  s.fwd = FlowField(6, 4);
  s.bwd = FlowField(6, 4);
  s.w_fwd = WeightMap(6, 4, 0.0);
  s.w_bwd = WeightMap(6, 4, 0.0);
  s.state.pose = test::random_pose(rng, 0.2, 0.5);
  s.state.inv_depth_r = DepthMap(6, 4, 1.0);
  s.state.inv_depth_s = DepthMap(6, 4, 1.0);
  for (std::size_t i = 0; i < 24; ++i) {
    s.fwd.flow[i] = Vec2(4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0);
    s.bwd.flow[i] = Vec2(4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0);
    s.w_fwd[i] = u(rng) < 0.85 ? 0.1 + u(rng) : 0.0;
    s.w_bwd[i] = u(rng) < 0.85 ? 0.1 + u(rng) : 0.0;
    s.state.inv_depth_r.depth[i] = 0.2 + 0.5 * u(rng);
    s.state.inv_depth_s.depth[i] = 0.2 + 0.5 * u(rng);
  }
  return s;
}

// Dense (6 + N) joint system from the per-pixel linearizations.
Eigen::VectorXd dense_solve(const SmallProblem& s, double lambda) {
  const int n = 6 + 48;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int dir = 0; dir < 2; ++dir) {
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 6; ++x) {
        const std::size_t i = s.fwd.flow.index(x, y);
        const double w = dir == 0 ? s.w_fwd[i] : s.w_bwd[i];
        const auto lin =
            dir == 0 ? linearize_forward_pixel(s.state.pose, s.state.inv_depth_r.depth[i], x, y,
                                               s.fwd.flow[i], s.k)
                     : linearize_backward_pixel(s.state.pose, s.state.inv_depth_s.depth[i], x, y,
                                                s.bwd.flow[i], s.k);
        if (!lin.valid || w == 0.0) continue;
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, n);
        j.leftCols<6>() = lin.j_pose;
        j.col(6 + 24 * dir + static_cast<int>(i)) = lin.j_depth;
        h += w * j.transpose() * j;
        b += w * j.transpose() * lin.residual;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (h(i, i) == 0.0) h(i, i) = 1.0;  // unused depth variables
    else h(i, i) *= 1.0 + lambda;
  }
  return h.fullPivLu().solve(b);
}

TEST(Wba, SchurMatchesDenseSolve) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SmallProblem s = make_small(seed);
    const NormalEquations ne = linearize(s.state, s.inputs());
    ASSERT_LE(ne.active, 50u);
    const double lambda = 1e-3;
    const SchurSolution sol = schur_solve(ne, lambda);
    const Eigen::VectorXd ref = dense_solve(s, lambda);
    Eigen::VectorXd got(6 + 48);
    got.head<6>() = sol.twist.vector();
    for (int i = 0; i < 24; ++i) {
      got(6 + i) = sol.delta_fwd[static_cast<std::size_t>(i)];
      got(30 + i) = sol.delta_bwd[static_cast<std::size_t>(i)];
    }
    worst = std::max(worst, (got - ref).norm() / ref.norm());
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Wba, SchurTenPixelProblem) {
  SmallProblem s = make_small(77);
  int kept = 0;
  for (std::size_t i = 0; i < 24; ++i) {
    s.w_bwd[i] = 0.0;
    if (s.w_fwd[i] > 0.0 && ++kept > 10) s.w_fwd[i] = 0.0;
  }
  const NormalEquations ne = linearize(s.state, s.inputs());
  ASSERT_EQ(ne.active, 10u);
  const SchurSolution sol = schur_solve(ne, 1e-2);
  const Eigen::VectorXd ref = dense_solve(s, 1e-2);
  EXPECT_LT((sol.twist.vector() - ref.head<6>()).norm() / ref.head<6>().norm(), 1e-8);
}

TEST(Wba, ZeroResidualsGiveZeroStep) {
  const Problem p = make_problem(3, 32);
  WbaState gt;
  gt.pose = p.scene.gt_pose;
  gt.inv_depth_r = inverse_of(p.scene.gt_depth_r);
  gt.inv_depth_s = inverse_of(p.scene.gt_depth_s);
  WeightMap wf = p.w_fwd, wb = p.w_bwd;
  for (std::size_t i = 0; i < wf.size(); ++i) {
    if (!gt.inv_depth_r.is_valid(i)) wf[i] = 0.0;
    if (!gt.inv_depth_s.is_valid(i)) wb[i] = 0.0;
  }
  WbaInputs in{p.scene.camera, &p.flow.clean_fwd, &wf, &p.flow.clean_bwd, &wb};
  const SchurSolution sol = schur_solve(linearize(gt, in), 1e-4);
  EXPECT_LT(sol.twist.norm(), 1e-9);
  for (double d : sol.delta_fwd) EXPECT_LT(std::abs(d), 1e-9);
}

TEST(Wba, ZeroWeightsAreSingular) {
  SmallProblem s = make_small(1);
  for (std::size_t i = 0; i < 24; ++i) s.w_fwd[i] = s.w_bwd[i] = 0.0;
  const NormalEquations ne = linearize(s.state, s.inputs());
  EXPECT_EQ(ne.h_pose, Mat6::Zero());
  try {
    schur_solve(ne, 1e-4);
    FAIL() << "expected SingularSystem";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularSystem);
  }
}

TEST(Wba, ZeroWeightPixelContributesNothing) {
  SmallProblem a = make_small(4);
  SmallProblem b = a;
  const std::size_t i = 7;
  a.w_fwd[i] = 0.0;
  b.w_fwd[i] = 0.0;
  b.fwd.flow[i] = Vec2(100.0, -50.0);
  b.state.inv_depth_r.depth[i] = 3.0;
  const NormalEquations na = linearize(a.state, a.inputs());
  const NormalEquations nb = linearize(b.state, b.inputs());
  EXPECT_EQ(na.h_pose, nb.h_pose);
  EXPECT_EQ(na.b_pose, nb.b_pose);
  EXPECT_EQ(na.cost, nb.cost);
  EXPECT_EQ(nb.fwd[i].h, 0.0);
  EXPECT_EQ(nb.fwd[i].b, 0.0);
}

TEST(Wba, ParallelLinearizeMatchesReference) {
  const Problem p = make_problem(5, 96, 0.5);
  WbaState s;
  std::mt19937_64 rng(3);
  s.pose = test::random_pose(rng, 0.1, 1.0);
  s.inv_depth_r = DepthMap(96, 72, 0.3);
  s.inv_depth_s = DepthMap(96, 72, 0.25);
  const WbaInputs in = p.inputs();
  const NormalEquations a = linearize(s, in);
  const NormalEquations b = linearize_ref(s, in);
  EXPECT_LT((a.h_pose - b.h_pose).norm(), 1e-10 * b.h_pose.norm());
  EXPECT_LT((a.b_pose - b.b_pose).norm(), 1e-10 * b.b_pose.norm());
  EXPECT_NEAR(a.cost, b.cost, 1e-10 * b.cost);
  EXPECT_EQ(a.active, b.active);
  EXPECT_NEAR(evaluate_cost(s, in), evaluate_cost_ref(s, in), 1e-10 * b.cost);
  EXPECT_EQ(evaluate_cost(s, in), a.cost);
}

TEST(Wba, LinearizeBitIdenticalAcrossThreadCounts) {
  const Problem p = make_problem(6, 96, 0.5);
  WbaState s;
  s.pose = p.scene.gt_pose;
  s.inv_depth_r = DepthMap(96, 72, 0.3);
  s.inv_depth_s = DepthMap(96, 72, 0.3);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const NormalEquations one = linearize(s, p.inputs());
  omp_set_num_threads(8);
  const NormalEquations eight = linearize(s, p.inputs());
  omp_set_num_threads(saved);
  EXPECT_EQ(one.h_pose, eight.h_pose);
  EXPECT_EQ(one.b_pose, eight.b_pose);
  EXPECT_EQ(one.cost, eight.cost);
}

TEST(Wba, NoiselessSolveRecoversPoseAndDepth) {
  for (std::uint64_t seed = 10; seed < 13; ++seed) {
    const Problem p = make_problem(seed, 64);
    WbaInputs in = p.inputs();
    const FlowField& ff = p.flow.clean_fwd;
    const FlowField& fb = p.flow.clean_bwd;
    in.flow_fwd = &ff;
    in.flow_bwd = &fb;
    const WbaResult r = wba_solve(in, ransac_init(p), WbaConfig{});
    const PoseError err = pose_error(p.scene.gt_pose, r.state.pose);
    EXPECT_LT(err.rot_deg, 0.01);
    EXPECT_LT(err.trans_deg, 0.05);
    const DepthMap z = depth_from_inverse(r.state.inv_depth_r);
    const double s = median_scale(p.scene.gt_depth_r, z);
    std::vector<double> rel;
    for (std::size_t i = 0; i < z.depth.size(); ++i) {
      if (z.is_valid(i) && p.scene.gt_depth_r.is_valid(i) && p.w_fwd[i] > 0.0) {
        rel.push_back(std::abs(s * z.depth[i] - p.scene.gt_depth_r.depth[i]) /
                      p.scene.gt_depth_r.depth[i]);
      }
    }
    EXPECT_LT(median(rel), 1e-3);
    EXPECT_NEAR(r.state.pose.translation.norm(), 1.0, 1e-12);
  }
}

TEST(Wba, AcceptedCostsStrictlyDecrease) {
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    const Problem p = make_problem(seed, 48, 1.0);
    WbaConfig cfg;
    cfg.max_iterations = 30;
    const WbaResult r = wba_solve(p.inputs(), ransac_init(p), cfg);
    ASSERT_FALSE(r.report.accepted_costs.empty());
    for (std::size_t i = 1; i < r.report.accepted_costs.size(); ++i) {
      EXPECT_LT(r.report.accepted_costs[i], r.report.accepted_costs[i - 1]);
    }
    for (const auto& it : r.report.iterations) EXPECT_GE(it.cost, 0.0);
    EXPECT_LE(r.report.iterations.size(), 30u);
  }
}

TEST(Wba, GaugeInvariance) {
  const Problem p = make_problem(30, 48, 0.5);
  WbaState a;
  a.pose = ransac_init(p);
  a.inv_depth_r = DepthMap(48, 36, 1.0);
  a.inv_depth_s = DepthMap(48, 36, 1.0);
  WbaState b = a;
  const double s = 3.7;
  b.pose.translation *= s;
  for (double& d : b.inv_depth_r.depth.values()) d /= s;
  for (double& d : b.inv_depth_s.depth.values()) d /= s;
  const WbaResult ra = wba_solve(p.inputs(), a, WbaConfig{});
  const WbaResult rb = wba_solve(p.inputs(), b, WbaConfig{});
  EXPECT_LT(rotation_angle(ra.state.pose.rotation.transpose() * rb.state.pose.rotation), 1e-9);
  EXPECT_LT((ra.state.pose.translation - rb.state.pose.translation).norm(), 1e-9);
}

TEST(Wba, DirectionSymmetry) {
  const Problem p = make_problem(31, 96, 0.5);
  WbaConfig cfg;
  cfg.max_iterations = 200;
  cfg.step_tolerance = 1e-13;
  const PoseSE3 t0 = ransac_init(p);
  const WbaResult fwd = wba_solve(p.inputs(), t0, cfg);
  WbaInputs swapped{p.scene.camera, &p.flow.bwd, &p.w_bwd, &p.flow.fwd, &p.w_fwd};
  const WbaResult bwd = wba_solve(swapped, inverse(t0), cfg);
  const Mat3 prod = fwd.state.pose.rotation * bwd.state.pose.rotation;
  EXPECT_LT(rotation_angle(prod), 1e-6);
  const Vec3 expected = -(fwd.state.pose.rotation.transpose() * fwd.state.pose.translation);
  EXPECT_LT((bwd.state.pose.translation.normalized() - expected.normalized()).norm(), 1e-6);
}

TEST(Wba, ZeroFlowIsSingularOrUndetermined) {
  const CameraIntrinsics k = test::camera(32, 24);
  const FlowField zero(32, 24);
  const WeightMap w(32, 24, 1.0);
  WbaInputs in{k, &zero, &w, &zero, &w};
  try {
    const WbaResult r = wba_solve(in, PoseSE3::identity(), WbaConfig{});
    EXPECT_FALSE(r.report.translation_determined);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularSystem);
  }
}

TEST(Wba, TooFewWeightedPixels) {
  const Problem p = make_problem(40, 32);
  WeightMap w(32, 24, 0.0);
  for (int i = 0; i < 19; ++i) w[static_cast<std::size_t>(i * 7)] = 1.0;
  WbaInputs in{p.scene.camera, &p.flow.fwd, &w, nullptr, nullptr};
  try {
    wba_solve(in, p.scene.gt_pose, WbaConfig{});
    FAIL() << "expected NoValidPixels";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoValidPixels);
  }
}

TEST(Wba, ForwardOnlySolve) {
  const Problem p = make_problem(41, 64);
  WbaInputs in = p.inputs(false);
  in.flow_fwd = &p.flow.clean_fwd;
  const WbaResult r = wba_solve(in, ransac_init(p), WbaConfig{});
  EXPECT_LT(pose_error(p.scene.gt_pose, r.state.pose).rot_deg, 0.01);
  EXPECT_TRUE(r.state.inv_depth_s.depth.empty());
}

TEST(Wba, OracleWeightsBeatUniformWeights) {
  int wins = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    Problem p;
    p.scene = generate_scene(test::scene_config(500 + t, 160));
    CorruptionConfig cc;
    cc.noise_sigma = 1.0;
    cc.outlier_rate = 0.2;
    cc.rng_seed = 900 + t;
    p.flow = render_flow(p.scene, cc);
    const PoseSE3 t0 = ransac_init_from(p.flow.fwd, p.scene.camera);
    const WeightMap uni_f = valid_weights(p.flow.fwd), uni_b = valid_weights(p.flow.bwd);
    WeightMap orc_f = uni_f, orc_b = uni_b;
    for (std::size_t i = 0; i < orc_f.size(); ++i) {
      if (p.flow.outliers_fwd[i]) orc_f[i] = 0.0;
      if (p.flow.outliers_bwd[i]) orc_b[i] = 0.0;
    }
    WbaInputs uni{p.scene.camera, &p.flow.fwd, &uni_f, &p.flow.bwd, &uni_b};
    WbaInputs orc{p.scene.camera, &p.flow.fwd, &orc_f, &p.flow.bwd, &orc_b};
    double e_uni = 180.0, e_orc = 180.0;
    try {
      e_uni = pose_error(p.scene.gt_pose, wba_solve(uni, t0, WbaConfig{}).state.pose).rot_deg;
    } catch (const Error&) {
    }
    try {
      e_orc = pose_error(p.scene.gt_pose, wba_solve(orc, t0, WbaConfig{}).state.pose).rot_deg;
    } catch (const Error&) {
    }
    wins += e_orc <= e_uni;
  }
  EXPECT_GE(wins, 40);
}

TEST(Wba, ConfigValidation) {
  WbaConfig cfg;
  cfg.max_iterations = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = WbaConfig{};
  cfg.gamma = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = WbaConfig{};
  cfg.damping_init = -1.0;
  EXPECT_THROW(cfg.validate(), Error);
}

}  // namespace
}  // namespace dtvsfm
