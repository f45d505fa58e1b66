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


#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "dtvsfm/config.hpp"
#include "dtvsfm/error.hpp"
#include "dtvsfm/io.hpp"
#include "dtvsfm/metrics.hpp"
#include "dtvsfm/parallel.hpp"
#include "dtvsfm/refine.hpp"
#include "dtvsfm/synth.hpp"

namespace dtvsfm::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError:
    case ErrorCode::kBadMagic:
    case ErrorCode::kTruncatedFile:
    case ErrorCode::kMalformedHeader:
      return kExitIo;
    case ErrorCode::kDegenerateGeometry:
    case ErrorCode::kSingularSystem:
    case ErrorCode::kNoValidPixels:
    case ErrorCode::kInsufficientMatches:
    case ErrorCode::kAngleNearPi:
      return kExitDegenerate;
    default:
      return kExitConfig;
  }
}

Grid<double> mask_values(const ByteGrid& mask) {
  Grid<double> out(mask.width(), mask.height(), 0.0);
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 1.0 : 0.0;
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorCode::kIoError, "cannot create directory " + dir.string());
}

RunConfig config_or_default(const std::string& path) {
  return path.empty() ? RunConfig{} : load_run_config(path);
}

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !(v > 0.0)) {
      fail(ErrorCode::kConfigError, "thresholds must be positive numbers: '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) fail(ErrorCode::kConfigError, "no thresholds given");
  return out;
}

void cmd_synth(const std::string& config_path, const fs::path& out) {
  const RunConfig cfg = config_or_default(config_path);
  const SyntheticScene scene = generate_scene(cfg.scene);
  const RenderedFlow flow = render_flow(scene, cfg.corruption);
  ensure_dir(out);
  io::write_intrinsics(out / "intrinsics.json", scene.camera);
  io::write_pose(out / "gt_pose.json", scene.gt_pose);
  io::write_depth(out / "depth_r.pfm", scene.gt_depth_r);
  io::write_depth(out / "depth_s.pfm", scene.gt_depth_s);
  io::write_flow(out / "flow_fwd.flo", flow.fwd);
  io::write_flow(out / "flow_bwd.flo", flow.bwd);
  io::write_pfm(out / "conf_fwd.pfm", flow.conf_fwd);
  io::write_pfm(out / "conf_bwd.pfm", flow.conf_bwd);
  io::write_pfm(out / "outliers_fwd.pfm", mask_values(flow.outliers_fwd));
  io::write_pfm(out / "outliers_bwd.pfm", mask_values(flow.outliers_bwd));
}

struct EstimateArgs {
  std::string flow_fwd, flow_bwd, conf_fwd, conf_bwd, intrinsics, config, out;
  std::string gt_pose, gt_depth;
  bool single_direction = false;
};

std::string diagnostics_csv(const SfmResult& res) {
  std::string csv =
      "iteration,wba_initial_cost,wba_final_cost,wba_iterations,wba_converged,"
      "weight_sum_fwd,weight_sum_bwd,rot_err_deg,trans_err_deg,depth_l1_rel,depth_l1_inv,"
      "depth_sc_inv\n";
  for (const auto& d : res.diagnostics) {
    csv += std::to_string(d.iteration) + "," + num(d.wba_initial_cost) + "," +
           num(d.wba_final_cost) + "," + std::to_string(d.wba_iterations) + "," +
           (d.wba_converged ? "1" : "0") + "," + num(d.weight_sum_fwd) + "," +
           num(d.weight_sum_bwd) + ",";
    csv += d.pose_error ? num(d.pose_error->rot_deg) + "," + num(d.pose_error->trans_deg) : ",";
    csv += ",";
    csv += d.depth_error ? num(d.depth_error->l1_rel) + "," + num(d.depth_error->l1_inv) + "," +
                               num(d.depth_error->sc_inv)
                         : ",,";
    csv += "\n";
  }
  return csv;
}

int cmd_estimate(const EstimateArgs& a) {
  RunConfig cfg = config_or_default(a.config);
  const CameraIntrinsics k = io::read_intrinsics(a.intrinsics);
  const FlowField flow_fwd = io::read_flow(a.flow_fwd);
  const ConfidenceMap conf_fwd = io::read_confidence(a.conf_fwd);
  std::optional<FlowField> flow_bwd;
  std::optional<ConfidenceMap> conf_bwd;
  if (a.single_direction) {
    cfg.pipeline.bidirectional = false;
  } else {
    if (a.flow_bwd.empty() || a.conf_bwd.empty()) {
      fail(ErrorCode::kConfigError,
           "backward flow and confidence are required unless --single-direction is given");
    }
    flow_bwd = io::read_flow(a.flow_bwd);
    conf_bwd = io::read_confidence(a.conf_bwd);
  }

  std::optional<GroundTruth> gt;
  if (!a.gt_pose.empty()) {
    gt = GroundTruth{io::read_pose(a.gt_pose), std::nullopt};
    if (!a.gt_depth.empty()) gt->depth_r = io::read_depth(a.gt_depth);
  } else if (!a.gt_depth.empty()) {
    fail(ErrorCode::kConfigError, "--gt-depth requires --gt-pose");
  }

  PipelineInputs in;
  in.camera = k;
  in.flow_fwd = &flow_fwd;
  in.conf_fwd = &conf_fwd;
  if (flow_bwd) {
    in.flow_bwd = &*flow_bwd;
    in.conf_bwd = &*conf_bwd;
  }

  const fs::path out(a.out);
  ensure_dir(out);
  SfmResult res;
  try {
    res = run_pipeline(in, cfg.pipeline, gt ? &*gt : nullptr);
  } catch (const Error& e) {
    if (exit_code_for(e.code()) == kExitDegenerate) {
      io::write_json(out / "error.json",
                     {{"error", to_string(e.code())}, {"message", e.what()}, {"exit_code", 3}});
    }
    throw;
  }
  io::write_pose(out / "pose.json", res.pose);
  io::write_depth(out / "depth_r.pfm", res.depth_r);
  if (res.bidirectional) io::write_depth(out / "depth_s.pfm", res.depth_s);
  io::write_pfm(out / "weights_fwd.pfm", res.w_fwd);
  if (res.bidirectional) io::write_pfm(out / "weights_bwd.pfm", res.w_bwd);
  io::write_file(out / "diagnostics.csv", diagnostics_csv(res));
  if (res.warning) std::cerr << "warning: " << res.warning_message << "\n";
  return kExitOk;
}

void cmd_eval_pose(const std::string& gt_path, const std::string& est_path,
                   const std::string& thresholds_text, const std::string& csv_path) {
  const std::vector<double> thresholds = parse_thresholds(thresholds_text);
  const std::vector<PoseSE3> gt = io::read_poses(gt_path);
  const std::vector<PoseSE3> est = io::read_poses(est_path);
  if (gt.size() != est.size()) {
    fail(ErrorCode::kDimensionMismatch, "ground truth and estimate hold different pose counts");
  }
  std::vector<double> errors;
  std::vector<PoseError> per_pair;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    per_pair.push_back(pose_error(gt[i], est[i]));
    errors.push_back(per_pair.back().max_deg);
  }
  const auto auc = pose_auc(errors, thresholds);
  const auto map = pose_map(errors, thresholds);

  std::string header, row;
  for (double t : thresholds) header += "AUC@" + fixed(t, 0 + (t != static_cast<int>(t)) * 2) + ",";
  for (double t : thresholds) header += "mAP@" + fixed(t, 0 + (t != static_cast<int>(t)) * 2) + ",";
  header.pop_back();
  for (double v : auc) row += num(v) + ",";
  for (double v : map) row += num(v) + ",";
  row.pop_back();

  std::cout << "pairs: " << gt.size() << "\n";
  std::cout << "median rotation error (deg): " << fixed(median([&] {
    std::vector<double> r;
    for (const auto& p : per_pair) r.push_back(p.rot_deg);
    return r;
  }()), 4) << "\n";
  std::cout << "median translation error (deg): " << fixed(median([&] {
    std::vector<double> r;
    for (const auto& p : per_pair) r.push_back(p.trans_deg);
    return r;
  }()), 4) << "\n";
  std::cout << "\n";
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    std::cout << "  @" << fixed(thresholds[i], 1) << " deg   AUC " << fixed(auc[i], 2) << "   mAP "
              << fixed(map[i], 2) << "\n";
  }
  std::cout << "\n" << header << "\n" << row << "\n";
  if (!csv_path.empty()) io::write_file(csv_path, header + "\n" + row + "\n");
}

void cmd_eval_depth(const std::string& gt_path, const std::string& est_path, bool scale_align,
                    const std::string& csv_path) {
  const DepthMap gt = io::read_depth(gt_path);
  const DepthMap est = io::read_depth(est_path);
  const DepthErrorReport r = depth_metrics(gt, est, scale_align);
  const std::string header = "l1_inv,sc_inv,l1_rel,pixels,scale";
  const std::string row = num(r.l1_inv) + "," + num(r.sc_inv) + "," + num(r.l1_rel) + "," +
                          std::to_string(r.pixels) + "," + num(r.scale);
  std::cout << "pixels: " << r.pixels << "\n"
            << "scale:  " << num(r.scale) << "\n"
            << "L1-inv: " << num(r.l1_inv) << "\n"
            << "sc-inv: " << num(r.sc_inv) << "\n"
            << "L1-rel: " << num(r.l1_rel) << "\n\n"
            << header << "\n" << row << "\n";
  if (!csv_path.empty()) io::write_file(csv_path, header + "\n" + row + "\n");
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Dense two-view structure from motion with weighted bundle adjustment"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 success, 1 I/O error, 2 config/validation error, 3 numerical "
             "degeneracy.\nDTVSFM_THREADS caps worker threads (0 = auto).\n\n"
             "Configuration defaults (unknown keys are rejected):\n" +
             to_json(RunConfig{}).dump(2));

  std::string synth_config, synth_out;
  auto* synth = app.add_subcommand("synth", "Render a synthetic scene with corrupted flow");
  synth->add_option("--config", synth_config, "Run configuration JSON (defaults when omitted)");
  synth->add_option("--out", synth_out, "Output directory")->required();

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate pose and depth from dense flow");
  estimate->add_option("--flow-fwd", est.flow_fwd, "Forward flow (.flo)")->required();
  estimate->add_option("--flow-bwd", est.flow_bwd, "Backward flow (.flo)");
  estimate->add_option("--conf-fwd", est.conf_fwd, "Forward confidence (.pfm)")->required();
  estimate->add_option("--conf-bwd", est.conf_bwd, "Backward confidence (.pfm)");
  estimate->add_option("--intrinsics", est.intrinsics, "Intrinsics JSON")->required();
  estimate->add_option("--config", est.config, "Run configuration JSON");
  estimate->add_option("--out", est.out, "Output directory")->required();
  estimate->add_flag("--single-direction", est.single_direction,
                     "Forward-only WBA; backward inputs are ignored");
  estimate->add_option("--gt-pose", est.gt_pose, "Ground-truth pose for diagnostics");
  estimate->add_option("--gt-depth", est.gt_depth, "Ground-truth reference depth for diagnostics");

  std::string ep_gt, ep_est, ep_thr = "5,10,20", ep_csv;
  auto* eval_pose = app.add_subcommand("eval-pose", "AUC and mAP of pose errors");
  eval_pose->add_option("--gt", ep_gt, "Ground-truth pose record(s)")->required();
  eval_pose->add_option("--est", ep_est, "Estimated pose record(s)")->required();
  eval_pose->add_option("--thresholds", ep_thr, "Comma-separated thresholds, degrees")
      ->capture_default_str();
  eval_pose->add_option("--csv", ep_csv, "Also write the CSV row to this path");

  std::string ed_gt, ed_est, ed_csv;
  bool ed_align = false;
  auto* eval_depth = app.add_subcommand("eval-depth", "L1-inv, sc-inv and L1-rel depth errors");
  eval_depth->add_option("--gt", ed_gt, "Ground-truth depth (.pfm)")->required();
  eval_depth->add_option("--est", ed_est, "Estimated depth (.pfm)")->required();
  eval_depth->add_flag("--scale-align", ed_align, "Median-ratio scale alignment first");
  eval_depth->add_option("--csv", ed_csv, "Also write the CSV row to this path");

  std::string pc_config;
  auto* print_config = app.add_subcommand("print-config", "Print the effective configuration");
  print_config->add_option("--config", pc_config, "Run configuration JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    configure_threads_from_env();
    if (*synth) {
      cmd_synth(synth_config, synth_out);
    } else if (*estimate) {
      return cmd_estimate(est);
    } else if (*eval_pose) {
      cmd_eval_pose(ep_gt, ep_est, ep_thr, ep_csv);
    } else if (*eval_depth) {
      cmd_eval_depth(ed_gt, ed_est, ed_align, ed_csv);
    } else if (*print_config) {
      std::cout << to_json(config_or_default(pc_config)).dump(2) << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("dtvsfm");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace dtvsfm::cli
