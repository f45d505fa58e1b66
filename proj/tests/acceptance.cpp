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


// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. argv[1] is the path of the CLI binary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dtvsfm/geometry.hpp"
#include "dtvsfm/metrics.hpp"
#include "dtvsfm/refine.hpp"
#include "dtvsfm/synth.hpp"
#include "dtvsfm/uncertainty.hpp"
#include "dtvsfm/wba.hpp"

namespace dtvsfm {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kDeg = 180.0 / std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void report(int id, const char* name, Outcome o, double seconds, double budget) {
  if (budget > 0.0) {
    o.require(seconds < budget, "runtime " + fmt("%.2f", seconds) + " s < " + fmt("%.0f", budget) + " s");
  } else {
    o.detail += "; runtime " + fmt("%.2f", seconds) + " s";
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Vec3(n(rng), n(rng), n(rng)).normalized();
}

PoseSE3 random_pose(std::mt19937_64& rng, double max_angle, double trans) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Twist xi;
  xi.omega = random_unit(rng) * (max_angle * u(rng));
  PoseSE3 p = se3_exp(xi);
  p.translation = random_unit(rng) * trans;
  return p;
}

CameraIntrinsics camera(int w, int h, double f) {
  CameraIntrinsics k;
  k.fx = k.fy = f;
  k.cx = 0.5 * (w - 1);
  k.cy = 0.5 * (h - 1);
  k.width = w;
  k.height = h;
  return k;
}

double median_of(std::vector<double> v) { return median(std::move(v)); }

// ---------------------------------------------------------------------------

Outcome geometry_suite() {
  Outcome o;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Twist xi;
    xi.omega = random_unit(rng) * (3.0 * std::abs(u(rng)));
    xi.nu = Vec3(5.0 * u(rng), 5.0 * u(rng), 5.0 * u(rng));
    worst = std::max(worst, (se3_log(se3_exp(xi)).vector() - xi.vector()).cwiseAbs().maxCoeff());
  }
  o.require(worst < 1e-9, "exp/log roundtrip max " + fmt("%.2e", worst) + " < 1e-9");

  const CameraIntrinsics k = camera(64, 48, 64.0);
  DepthMap z(64, 48);
  std::uniform_real_distribution<double> ud(1.0, 10.0);
  for (auto& v : z.depth.values()) v = ud(rng);
  const FlowField ident = induced_flow(PoseSE3{}, z, k);
  double max_ident = 0.0;
  for (std::size_t i = 0; i < ident.flow.size(); ++i) {
    max_ident = std::max(max_ident, ident.flow[i].cwiseAbs().maxCoeff());
  }
  o.require(max_ident == 0.0 && ident.count_valid() == ident.flow.size(),
            "identity flow max |f| = " + fmt("%.1e", max_ident));

  PoseSE3 shift;
  shift.translation = Vec3(0.3, 0.0, 0.0);
  const FlowField tf = induced_flow(shift, z, k);
  double worst_t = 0.0;
  for (std::size_t i = 0; i < tf.flow.size(); ++i) {
    worst_t = std::max(worst_t, std::abs(tf.flow[i].x() - k.fx * 0.3 / z.depth[i]));
    worst_t = std::max(worst_t, std::abs(tf.flow[i].y()));
  }
  o.require(worst_t < 1e-9, "pure translation max error " + fmt("%.2e", worst_t) + " < 1e-9");
  return o;
}

// ---------------------------------------------------------------------------

Vec2 induced_at(const PoseSE3& pose, double d, int x, int y, const CameraIntrinsics& k, bool fwd) {
  const Vec3 p = k.bearing(x, y) / d;
  return k.project(fwd ? pose * p : inverse(pose) * p);
}

Outcome jacobian_suite() {
  Outcome o;
  const CameraIntrinsics k = camera(64, 48, 64.0);
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> ux(0, 63), uy(0, 47);
  std::uniform_real_distribution<double> ud(0.1, 0.6);
  const double eps = 1e-6;
  double worst = 0.0;
  int configs = 0;
  while (configs < 100) {
    const PoseSE3 pose = random_pose(rng, 0.3, 1.0);
    const int x = ux(rng), y = uy(rng);
    const double d = ud(rng);
    bool any = false;
    for (bool fwd : {true, false}) {
      const PixelLinearization lin = fwd ? linearize_forward_pixel(pose, d, x, y, Vec2::Zero(), k)
                                         : linearize_backward_pixel(pose, d, x, y, Vec2::Zero(), k);
      if (!lin.valid) continue;
      any = true;
      Eigen::Matrix<double, 2, 7> fd, an;
      for (int j = 0; j < 6; ++j) {
        Vec6 e = Vec6::Zero();
        e(j) = eps;
        fd.col(j) = (induced_at(retract(Twist::from_vector(e), pose), d, x, y, k, fwd) -
                     induced_at(retract(Twist::from_vector(-e), pose), d, x, y, k, fwd)) /
                    (2.0 * eps);
      }
      fd.col(6) = (induced_at(pose, d + eps, x, y, k, fwd) - induced_at(pose, d - eps, x, y, k, fwd)) /
                  (2.0 * eps);
      an.leftCols<6>() = lin.j_pose;
      an.col(6) = lin.j_depth;
      worst = std::max(worst, (an - fd).norm() / fd.norm());
    }
    configs += any;
  }
  o.require(worst < 1e-4, "max relative error " + fmt("%.2e", worst) + " < 1e-4 over 100 configurations");
  return o;
}

// ---------------------------------------------------------------------------

Outcome schur_suite() {
  Outcome o;
  constexpr int kW = 6, kH = 4, kN = kW * kH;
  double worst = 0.0;
  std::size_t max_active = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(900 + seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const CameraIntrinsics k = camera(kW, kH, 8.0);
    FlowField fwd(kW, kH), bwd(kW, kH);
    WeightMap wf(kW, kH, 0.0), wb(kW, kH, 0.0);
    WbaState st;
    st.pose = random_pose(rng, 0.2, 0.5);
    st.inv_depth_r = DepthMap(kW, kH);
    st.inv_depth_s = DepthMap(kW, kH);
    for (int i = 0; i < kN; ++i) {
      fwd.flow[i] = Vec2(4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0);
      bwd.flow[i] = Vec2(4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0);
      wf[i] = u(rng) < 0.85 ? 0.1 + u(rng) : 0.0;
      wb[i] = u(rng) < 0.85 ? 0.1 + u(rng) : 0.0;
      st.inv_depth_r.depth[i] = 0.2 + 0.5 * u(rng);
      st.inv_depth_s.depth[i] = 0.2 + 0.5 * u(rng);
    }
    const WbaInputs in{k, &fwd, &wf, &bwd, &wb};
    const NormalEquations ne = linearize(st, in);
    max_active = std::max(max_active, ne.active);
    const double lambda = 1e-3;
    const SchurSolution sol = schur_solve(ne, lambda);

    const int n = 6 + 2 * kN;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (int dir = 0; dir < 2; ++dir) {
      for (int y = 0; y < kH; ++y) {
        for (int x = 0; x < kW; ++x) {
          const int i = y * kW + x;
          const double w = dir == 0 ? wf[i] : wb[i];
          const PixelLinearization lin =
              dir == 0
                  ? linearize_forward_pixel(st.pose, st.inv_depth_r.depth[i], x, y, fwd.flow[i], k)
                  : linearize_backward_pixel(st.pose, st.inv_depth_s.depth[i], x, y, bwd.flow[i], k);
          if (!lin.valid || w == 0.0) continue;
          Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, n);
          j.leftCols<6>() = lin.j_pose;
          j.col(6 + kN * dir + i) = lin.j_depth;
          h += w * j.transpose() * j;
          b += w * j.transpose() * lin.residual;
        }
      }
    }
    for (int i = 0; i < n; ++i) h(i, i) = h(i, i) == 0.0 ? 1.0 : h(i, i) * (1.0 + lambda);
    const Eigen::VectorXd ref = h.fullPivLu().solve(b);
    Eigen::VectorXd got(n);
    got.head<6>() = sol.twist.vector();
    for (int i = 0; i < kN; ++i) {
      got(6 + i) = sol.delta_fwd[static_cast<std::size_t>(i)];
      got(6 + kN + i) = sol.delta_bwd[static_cast<std::size_t>(i)];
    }
    worst = std::max(worst, (got - ref).norm() / ref.norm());
  }
  o.require(max_active <= 50, "largest problem " + std::to_string(max_active) + " pixels");
  o.require(worst < 1e-8, "max relative error " + fmt("%.2e", worst) + " < 1e-8 over 20 instances");
  return o;
}

// ---------------------------------------------------------------------------

SceneConfig ensemble_scene(std::uint64_t seed, int width) {
  SceneConfig sc;
  sc.width = width;
  sc.height = width * 3 / 4;
  sc.rng_seed = seed;
  sc.pose.translation = 1.0;
  sc.depth.amplitude = 2.0;
  return sc;
}

Outcome noiseless_suite() {
  Outcome o;
  double rot = 0.0, trans = 0.0, rel = 0.0, ratio = 1e9;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SceneConfig sc = ensemble_scene(100 + seed, 64);
    ratio = std::min(ratio, sc.pose.translation / sc.depth.base_depth);
    const SyntheticScene scene = generate_scene(sc);
    const RenderedFlow rf = render_flow(scene, CorruptionConfig{});
    PipelineConfig cfg;
    cfg.ransac.rng_seed = seed;
    const PipelineInputs in{scene.camera, &rf.fwd, &rf.conf_fwd, &rf.bwd, &rf.conf_bwd};
    const SfmResult r = run_pipeline(in, cfg);
    const PoseError e = pose_error(scene.gt_pose, r.pose);
    rot = std::max(rot, e.rot_deg);
    trans = std::max(trans, e.trans_deg);
    const double s = median_scale(scene.gt_depth_r, r.depth_r);
    std::vector<double> errs;
    for (std::size_t i = 0; i < r.depth_r.depth.size(); ++i) {
      if (!scene.gt_depth_r.is_valid(i) || !r.depth_r.is_valid(i)) continue;
      const double g = scene.gt_depth_r.depth[i];
      errs.push_back(std::abs(s * r.depth_r.depth[i] - g) / g);
    }
    rel = std::max(rel, median_of(errs));
  }
  o.require(ratio >= 0.05, "10 seeds at 64x48, baseline/depth " + fmt("%.2f", ratio));
  o.require(rot < 0.01, "max rotation error " + fmt("%.2e", rot) + " deg < 0.01");
  o.require(trans < 0.05, "max translation error " + fmt("%.2e", trans) + " deg < 0.05");
  o.require(rel < 1e-3, "max median depth rel error " + fmt("%.2e", rel) + " < 1e-3");
  return o;
}

// ---------------------------------------------------------------------------

struct Variant {
  const char* name;
  MaskMode mode;
  bool bidirectional;
};

constexpr Variant kVariants[] = {
    {"conf+ransac/fb", MaskMode::kConfRansac, true}, {"conf/fb", MaskMode::kConf, true},
    {"ransac/fb", MaskMode::kRansac, true},          {"none/fb", MaskMode::kNone, true},
    {"conf+ransac/f", MaskMode::kConfRansac, false}, {"conf/f", MaskMode::kConf, false},
    {"ransac/f", MaskMode::kRansac, false},          {"none/f", MaskMode::kNone, false},
};
constexpr int kNumVariants = 8;
constexpr int kTrials = 50;
constexpr int kOuter = 4;

struct Ensemble {
  // rot[v][trial] at iteration 0.
  std::vector<std::vector<double>> rot{kNumVariants};
  // Per outer iteration for the default variant.
  std::vector<std::vector<double>> refine_rot{kOuter + 1}, refine_trans{kOuter + 1};
  int failures = 0;
  double seconds_ablation = 0.0;
  double seconds_refine = 0.0;
};

Ensemble run_ensemble() {
  Ensemble ens;
  for (int trial = 0; trial < kTrials; ++trial) {
    const SyntheticScene scene = generate_scene(ensemble_scene(1000 + trial, 320));
    CorruptionConfig cc;
    cc.noise_sigma = 1.0;
    cc.outlier_rate = 0.2;
    cc.confidence_model = ConfidenceModel::kOracle;
    cc.rng_seed = 5000 + trial;
    const RenderedFlow rf = render_flow(scene, cc);
    const PipelineInputs in{scene.camera, &rf.fwd, &rf.conf_fwd, &rf.bwd, &rf.conf_bwd};
    const GroundTruth gt{scene.gt_pose, std::nullopt};
    for (int v = 0; v < kNumVariants; ++v) {
      PipelineConfig cfg;
      cfg.ransac.rng_seed = static_cast<std::uint64_t>(trial);
      cfg.mask_mode = kVariants[v].mode;
      cfg.bidirectional = kVariants[v].bidirectional;
      cfg.refine.outer_iterations = v == 0 ? kOuter : 0;
      const auto t0 = Clock::now();
      try {
        const SfmResult r = run_pipeline(in, cfg, &gt);
        ens.rot[v].push_back(r.diagnostics[0].pose_error->rot_deg);
        if (v == 0) {
          for (int it = 0; it <= kOuter; ++it) {
            ens.refine_rot[it].push_back(r.diagnostics[it].pose_error->rot_deg);
            ens.refine_trans[it].push_back(r.diagnostics[it].pose_error->trans_deg);
          }
        }
      } catch (const std::exception& e) {
        std::fprintf(stderr, "trial %d %s: %s\n", trial, kVariants[v].name, e.what());
        ++ens.failures;
        ens.rot[v].push_back(180.0);
        if (v == 0) {
          for (int it = 0; it <= kOuter; ++it) {
            ens.refine_rot[it].push_back(180.0);
            ens.refine_trans[it].push_back(180.0);
          }
        }
      }
      const double dt = seconds_since(t0);
      (v == 0 ? ens.seconds_refine : ens.seconds_ablation) += dt;
    }
  }
  return ens;
}

double paired_win_rate(const std::vector<double>& a, const std::vector<double>& b) {
  int wins = 0;
  for (std::size_t i = 0; i < a.size(); ++i) wins += a[i] <= b[i];
  return static_cast<double>(wins) / static_cast<double>(a.size());
}

Outcome ablation_suite(const Ensemble& ens) {
  Outcome o;
  std::string medians = "median rot:";
  for (int v = 0; v < kNumVariants; ++v) {
    medians += std::string(" ") + kVariants[v].name + "=" + fmt("%.4f", median_of(ens.rot[v]));
  }
  o.detail = medians;
  auto pair = [&](int a, int b) {
    const double w = paired_win_rate(ens.rot[a], ens.rot[b]);
    o.require(w >= 0.6, std::string(kVariants[a].name) + " <= " + kVariants[b].name + " in " +
                            fmt("%.0f", 100.0 * w) + "% of trials");
  };
  // (a) combined mask against each single-mask variant, in both direction settings.
  pair(0, 1);
  pair(0, 2);
  pair(4, 5);
  pair(4, 6);
  // (b) bidirectional against forward-only.
  pair(0, 4);
  o.require(ens.failures == 0, std::to_string(ens.failures) + " solver failures");
  return o;
}

Outcome refinement_suite(const Ensemble& ens) {
  Outcome o;
  std::vector<double> mr, mt;
  std::string seq = "median rot/trans per iteration:";
  for (int it = 0; it <= kOuter; ++it) {
    mr.push_back(median_of(ens.refine_rot[it]));
    mt.push_back(median_of(ens.refine_trans[it]));
    seq += " " + fmt("%.4f", mr.back()) + "/" + fmt("%.4f", mt.back());
  }
  o.detail = seq;
  const double red_r = 1.0 - mr.back() / mr.front();
  const double red_t = 1.0 - mt.back() / mt.front();
  o.require(red_r >= 0.2, "rotation reduction " + fmt("%.1f", 100.0 * red_r) + "% >= 20%");
  o.require(red_t >= 0.2, "translation reduction " + fmt("%.1f", 100.0 * red_t) + "% >= 20%");
  bool mono = true;
  for (int it = 1; it <= kOuter; ++it) mono = mono && mr[it] <= mr[it - 1] && mt[it] <= mt[it - 1];
  o.require(mono, "non-increasing median sequence");
  return o;
}

// ---------------------------------------------------------------------------

double step_recall_auc(std::vector<double> errors, double tau) {
  std::sort(errors.begin(), errors.end());
  const double n = static_cast<double>(errors.size());
  double area = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const double lo = std::min(errors[i], tau);
    const double hi = i + 1 < errors.size() ? std::min(errors[i + 1], tau) : tau;
    area += (hi - lo) * static_cast<double>(i + 1) / n;
  }
  return 100.0 * area / tau;
}

Outcome metrics_suite() {
  Outcome o;
  std::mt19937_64 rng(31);
  std::exponential_distribution<double> ex(0.1);
  const std::vector<double> taus{5.0, 10.0, 20.0};
  double worst_auc = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> e(1 + trial % 41);
    for (double& v : e) v = ex(rng);
    const std::vector<double> auc = pose_auc(e, taus);
    for (std::size_t j = 0; j < taus.size(); ++j) {
      worst_auc = std::max(worst_auc, std::abs(auc[j] - step_recall_auc(e, taus[j])));
    }
  }
  o.require(worst_auc < 1e-9, "AUC vs step integration " + fmt("%.2e", worst_auc) + " < 1e-9");

  std::uniform_real_distribution<double> u(0.5, 10.0), c(0.0, 1.0);
  double worst_depth = 0.0, worst_scale = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    DepthMap gt(31, 17), est(31, 17);
    for (std::size_t i = 0; i < gt.depth.size(); ++i) {
      gt.depth[i] = u(rng);
      est.depth[i] = gt.depth[i] * (0.6 + 0.8 * c(rng));
      if (c(rng) < 0.1) gt.valid[i] = 0;
      if (c(rng) < 0.1) est.valid[i] = 0;
    }
    double l1_inv = 0.0, l1_rel = 0.0, sz = 0.0, sz2 = 0.0, n = 0.0;
    for (std::size_t i = 0; i < gt.depth.size(); ++i) {
      if (!gt.is_valid(i) || !est.is_valid(i)) continue;
      const double g = gt.depth[i], e = est.depth[i];
      l1_inv += std::abs(1.0 / e - 1.0 / g);
      l1_rel += std::abs(e - g) / g;
      const double z = std::log(e) - std::log(g);
      sz += z;
      sz2 += z * z;
      n += 1.0;
    }
    const double sc = std::sqrt(std::max(0.0, sz2 / n - (sz / n) * (sz / n)));
    const DepthErrorReport r = depth_metrics(gt, est);
    worst_depth = std::max({worst_depth, std::abs(r.l1_inv - l1_inv / n),
                            std::abs(r.l1_rel - l1_rel / n), std::abs(r.sc_inv - sc)});
    DepthMap scaled = est;
    const double s = 0.1 + 10.0 * c(rng);
    for (auto& v : scaled.depth.values()) v *= s;
    worst_scale = std::max(worst_scale, std::abs(depth_metrics(gt, scaled).sc_inv - r.sc_inv));
  }
  o.require(worst_depth < 1e-12, "depth metrics vs elementwise oracle " + fmt("%.2e", worst_depth) + " < 1e-12");
  o.require(worst_scale < 1e-12, "sc_inv scale invariance " + fmt("%.2e", worst_scale));
  return o;
}

// ---------------------------------------------------------------------------

// Composite Simpson over the disc, x = R sin(a), y = R cos(a) s.
double numeric_disc_mass(const PixelMixture& m, double radius, int n = 400) {
  auto density = [&](double x, double y) {
    double p = 0.0;
    for (const auto& c : m.components) {
      p += c.weight * std::exp(-(x * x + y * y) / (2.0 * c.variance)) /
           (2.0 * std::numbers::pi * c.variance);
    }
    return p;
  };
  auto sw = [n](int i) { return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
  const double ha = std::numbers::pi / n, hs = 2.0 / n;
  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double a = -0.5 * std::numbers::pi + i * ha;
    const double x = radius * std::sin(a), chord = radius * std::cos(a);
    double inner = 0.0;
    for (int j = 0; j <= n; ++j) inner += sw(j) * density(x, chord * (-1.0 + j * hs));
    total += sw(i) * inner * hs / 3.0 * chord * radius * std::cos(a);
  }
  return total * ha / 3.0;
}

Outcome confidence_suite() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> nk(1, 4);
  std::uniform_real_distribution<double> uw(0.05, 1.0), uv(0.05, 9.0), ur(0.2, 4.0);
  double worst = 0.0;
  bool mono = true;
  for (int trial = 0; trial < 100; ++trial) {
    PixelMixture m;
    double sum = 0.0;
    const int n = nk(rng);
    for (int i = 0; i < n; ++i) {
      m.components.push_back({uw(rng), uv(rng)});
      sum += m.components.back().weight;
    }
    for (auto& c : m.components) c.weight /= sum;
    const double r = ur(rng);
    worst = std::max(worst, std::abs(disc_mass(m, r) - numeric_disc_mass(m, r)));
    double prev = 0.0;
    for (int i = 1; i <= 40; ++i) {
      const double c = disc_mass(m, 0.1 * i);
      mono = mono && c >= prev;
      prev = c;
    }
  }
  o.require(worst < 1e-4, "closed form vs numeric integration " + fmt("%.2e", worst) + " < 1e-4");
  o.require(mono, "monotone in radius");
  return o;
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism_suite(const std::string& tool) {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "dtvsfm_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "config.json")
      << R"({"scene": {"width": 96, "height": 72, "rng_seed": 21, "pose": {"translation": 1.0}},)"
      << R"( "corruption": {"noise_sigma": 1.0, "outlier_rate": 0.2, "rng_seed": 22}})";
  auto run = [&](const std::string& env, const std::string& name) {
    const fs::path scene = dir / (name + "_scene"), est = dir / (name + "_est");
    const std::string cfg = (dir / "config.json").string();
    const std::string synth =
        env + " '" + tool + "' synth --config '" + cfg + "' --out '" + scene.string() + "' >/dev/null";
    const std::string estimate =
        env + " '" + tool + "' estimate --config '" + cfg + "' --flow-fwd '" +
        (scene / "flow_fwd.flo").string() + "' --flow-bwd '" + (scene / "flow_bwd.flo").string() +
        "' --conf-fwd '" + (scene / "conf_fwd.pfm").string() + "' --conf-bwd '" +
        (scene / "conf_bwd.pfm").string() + "' --intrinsics '" +
        (scene / "intrinsics.json").string() + "' --gt-pose '" + (scene / "gt_pose.json").string() +
        "' --out '" + est.string() + "' >/dev/null";
    return std::system(synth.c_str()) == 0 && std::system(estimate.c_str()) == 0;
  };
  const std::vector<std::pair<std::string, std::string>> runs{
      {"", "a"}, {"", "b"}, {"DTVSFM_THREADS=1", "t1"}, {"DTVSFM_THREADS=8", "t8"}};
  bool ran = true;
  for (const auto& [env, name] : runs) ran = ran && run(env, name);
  o.require(ran, "four synth+estimate runs exit 0");
  if (!ran) return o;
  std::size_t files = 0, mismatches = 0;
  for (const char* stage : {"_scene", "_est"}) {
    for (const auto& entry : fs::directory_iterator(dir / (std::string("a") + stage))) {
      const std::string ref = slurp(entry.path());
      ++files;
      for (const char* other : {"b", "t1", "t8"}) {
        const fs::path p = dir / (std::string(other) + stage) / entry.path().filename();
        if (!fs::exists(p) || slurp(p) != ref) {
          ++mismatches;
          std::fprintf(stderr, "mismatch: %s\n", p.string().c_str());
        }
      }
    }
  }
  o.require(files >= 15 && mismatches == 0, std::to_string(files) + " files x 3 reruns, " +
                                                std::to_string(mismatches) + " mismatches");
  fs::remove_all(dir);
  return o;
}

}  // namespace
}  // namespace dtvsfm

int main(int argc, char** argv) {
  using namespace dtvsfm;
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-dtvsfm>\n");
    return 2;
  }
  auto timed = [](int id, const char* name, double budget, const std::function<Outcome()>& f) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    report(id, name, o, seconds_since(t0), budget);
  };
  timed(1, "geometry", 1.0, geometry_suite);
  timed(2, "jacobians", 5.0, jacobian_suite);
  timed(3, "schur equivalence", 5.0, schur_suite);
  timed(4, "noiseless end-to-end", 30.0, noiseless_suite);

  const Ensemble ens = run_ensemble();
  report(5, "mask and direction ablation", ablation_suite(ens),
         ens.seconds_ablation + ens.seconds_refine, 300.0);
  report(6, "iterative refinement", refinement_suite(ens), ens.seconds_refine, 600.0);

  timed(7, "metrics", 0.0, metrics_suite);
  timed(8, "confidence", 0.0, confidence_suite);
  timed(9, "determinism", 0.0, [&] { return determinism_suite(argv[1]); });
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
