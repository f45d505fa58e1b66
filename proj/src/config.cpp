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


#include "dtvsfm/config.hpp"

#include <array>
#include <set>
#include <utility>

#include "dtvsfm/error.hpp"
#include "dtvsfm/io.hpp"

namespace dtvsfm {

namespace {

using nlohmann::json;

template <typename E, std::size_t N>
E parse_enum(const std::string& where, const std::string& text,
             const std::array<std::pair<const char*, E>, N>& table) {
  for (const auto& [name, value] : table) {
    if (text == name) return value;
  }
  std::string options;
  for (const auto& [name, _] : table) options += std::string(options.empty() ? "" : ", ") + name;
  fail(ErrorCode::kConfigError, where + ": unknown value '" + text + "' (expected " + options + ")");
}

template <typename E, std::size_t N>
std::string enum_name(E value, const std::array<std::pair<const char*, E>, N>& table) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::array<std::pair<const char*, MaskMode>, 4> kMaskModes{{
    {"conf_ransac", MaskMode::kConfRansac},
    {"conf", MaskMode::kConf},
    {"ransac", MaskMode::kRansac},
    {"none", MaskMode::kNone},
}};
constexpr std::array<std::pair<const char*, BackwardInliers>, 2> kBackwardInliers{{
    {"nearest", BackwardInliers::kNearest},
    {"sampson", BackwardInliers::kSampson},
}};
constexpr std::array<std::pair<const char*, DepthModelKind>, 4> kDepthKinds{{
    {"constant", DepthModelKind::kConstant},
    {"slanted_plane", DepthModelKind::kSlantedPlane},
    {"multi_plane", DepthModelKind::kMultiPlane},
    {"fractal", DepthModelKind::kFractalPerlin},
}};
constexpr std::array<std::pair<const char*, ConfidenceModel>, 3> kConfidenceModels{{
    {"oracle", ConfidenceModel::kOracle},
    {"calibrated", ConfidenceModel::kCalibrated},
    {"constant", ConfidenceModel::kConstant},
}};

// Reads the keys of one JSON object and rejects any it was not asked about.
class Section {
 public:
  Section(const json& root, std::string name) : name_(std::move(name)) {
    if (!root.contains(name_)) return;
    node_ = &root.at(name_);
    if (!node_->is_object()) fail(ErrorCode::kConfigError, name_ + " must be an object");
  }
  Section(const json& node, std::string name, bool) : node_(&node), name_(std::move(name)) {
    if (!node_->is_object()) fail(ErrorCode::kConfigError, name_ + " must be an object");
  }

  const json* find(const char* key) {
    known_.insert(key);
    if (node_ == nullptr || !node_->contains(key)) return nullptr;
    return &node_->at(key);
  }

  std::string where(const char* key) const { return name_ + "." + key; }

  void read(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(ErrorCode::kConfigError, where(key) + " must be a number");
      out = v->get<double>();
    }
  }
  void read(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(ErrorCode::kConfigError, where(key) + " must be an integer");
      out = v->get<int>();
    }
  }
  void read(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) {
        fail(ErrorCode::kConfigError, where(key) + " must be a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }
  void read(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(ErrorCode::kConfigError, where(key) + " must be a boolean");
      out = v->get<bool>();
    }
  }
  void read(const char* key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(ErrorCode::kConfigError, where(key) + " must be a number or null");
      }
    }
  }
  void read(const char* key, Vec3& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 3) {
        fail(ErrorCode::kConfigError, where(key) + " must be an array of 3 numbers");
      }
      for (int i = 0; i < 3; ++i) {
        if (!(*v)[i].is_number()) {
          fail(ErrorCode::kConfigError, where(key) + " must be an array of 3 numbers");
        }
        out(i) = (*v)[i].get<double>();
      }
    }
  }
  template <typename E, std::size_t N>
  void read(const char* key, E& out, const std::array<std::pair<const char*, E>, N>& table) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(ErrorCode::kConfigError, where(key) + " must be a string");
      out = parse_enum(where(key), v->get<std::string>(), table);
    }
  }

  void finish() const {
    if (node_ == nullptr) return;
    for (const auto& [key, _] : node_->items()) {
      if (!known_.contains(key)) fail(ErrorCode::kConfigError, "unknown key '" + name_ + "." + key + "'");
    }
  }

 private:
  const json* node_ = nullptr;
  std::string name_;
  std::set<std::string, std::less<>> known_;
};

json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

std::string to_string(MaskMode mode) { return enum_name(mode, kMaskModes); }
std::string to_string(BackwardInliers mode) { return enum_name(mode, kBackwardInliers); }
std::string to_string(DepthModelKind kind) { return enum_name(kind, kDepthKinds); }
std::string to_string(ConfidenceModel model) { return enum_name(model, kConfidenceModels); }

void RunConfig::validate() const {
  pipeline.validate();
  scene.validate();
  corruption.validate();
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::kConfigError, "config root must be an object");
  static const std::set<std::string, std::less<>> kSections{
      "ransac", "wba", "refine", "confidence", "pipeline", "scene", "corruption"};
  for (const auto& [key, _] : j.items()) {
    if (!kSections.contains(key)) fail(ErrorCode::kConfigError, "unknown config section '" + key + "'");
  }
  RunConfig cfg;

  Section ransac(j, "ransac");
  ransac.read("threshold", cfg.pipeline.ransac.threshold);
  ransac.read("confidence", cfg.pipeline.ransac.confidence);
  ransac.read("max_iterations", cfg.pipeline.ransac.max_iterations);
  ransac.read("rng_seed", cfg.pipeline.ransac.rng_seed);
  ransac.read("subsample_stride", cfg.pipeline.ransac.subsample_stride);
  ransac.read("refit_rounds", cfg.pipeline.ransac.refit_rounds);
  ransac.finish();

  Section wba(j, "wba");
  wba.read("max_iterations", cfg.pipeline.wba.max_iterations);
  wba.read("step_tolerance", cfg.pipeline.wba.step_tolerance);
  wba.read("damping_init", cfg.pipeline.wba.damping_init);
  wba.read("gamma", cfg.pipeline.wba.gamma);
  wba.read("huber_delta", cfg.pipeline.wba.huber_delta);
  wba.read("min_inverse_depth", cfg.pipeline.wba.min_inverse_depth);
  wba.read("max_inverse_depth", cfg.pipeline.wba.max_inverse_depth);
  {
    std::uint64_t n = cfg.pipeline.wba.min_active_pixels;
    wba.read("min_active_pixels", n);
    cfg.pipeline.wba.min_active_pixels = static_cast<std::size_t>(n);
  }
  wba.finish();

  Section refine(j, "refine");
  refine.read("sigma", cfg.pipeline.refine.sigma);
  refine.read("outer_iterations", cfg.pipeline.refine.outer_iterations);
  refine.read("mixup_alpha", cfg.pipeline.refine.mixup_alpha);
  refine.finish();

  Section conf(j, "confidence");
  conf.read("radius", cfg.pipeline.confidence.radius);
  conf.read("grid_filter", cfg.pipeline.confidence.grid_filter);
  conf.read("grid_cell", cfg.pipeline.confidence.grid_cell);
  conf.read("grid_quantile", cfg.pipeline.confidence.grid_quantile);
  conf.finish();

  Section pipe(j, "pipeline");
  pipe.read("mask_mode", cfg.pipeline.mask_mode, kMaskModes);
  pipe.read("backward_inliers", cfg.pipeline.backward_inliers, kBackwardInliers);
  pipe.read("bidirectional", cfg.pipeline.bidirectional);
  pipe.read("ransac_min_confidence", cfg.pipeline.ransac_min_confidence);
  pipe.finish();

  Section scene(j, "scene");
  scene.read("width", cfg.scene.width);
  scene.read("height", cfg.scene.height);
  scene.read("focal", cfg.scene.focal);
  scene.read("rng_seed", cfg.scene.rng_seed);
  if (const json* d = scene.find("depth")) {
    Section depth(*d, "scene.depth", true);
    depth.read("kind", cfg.scene.depth.kind, kDepthKinds);
    depth.read("base_depth", cfg.scene.depth.base_depth);
    depth.read("amplitude", cfg.scene.depth.amplitude);
    depth.read("slope_x", cfg.scene.depth.slope_x);
    depth.read("slope_y", cfg.scene.depth.slope_y);
    depth.read("planes", cfg.scene.depth.planes);
    depth.read("octaves", cfg.scene.depth.octaves);
    depth.read("feature_pixels", cfg.scene.depth.feature_pixels);
    depth.finish();
  }
  if (const json* p = scene.find("pose")) {
    Section pose(*p, "scene.pose", true);
    pose.read("rotation_deg", cfg.scene.pose.rotation_deg);
    pose.read("rotation_axis", cfg.scene.pose.rotation_axis);
    pose.read("translation", cfg.scene.pose.translation);
    pose.read("translation_dir", cfg.scene.pose.translation_dir);
    pose.finish();
  }
  scene.finish();

  Section corr(j, "corruption");
  corr.read("noise_sigma", cfg.corruption.noise_sigma);
  corr.read("outlier_rate", cfg.corruption.outlier_rate);
  corr.read("confidence_model", cfg.corruption.confidence_model, kConfidenceModels);
  corr.read("oracle_scale", cfg.corruption.oracle_scale);
  corr.read("constant_confidence", cfg.corruption.constant_confidence);
  corr.read("confidence_radius", cfg.corruption.confidence_radius);
  corr.read("rng_seed", cfg.corruption.rng_seed);
  corr.finish();

  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kConfigError, e.what());
  }
  return cfg;
}

json to_json(const RunConfig& cfg) {
  const auto& p = cfg.pipeline;
  json j;
  j["ransac"] = {{"threshold", p.ransac.threshold},
                 {"confidence", p.ransac.confidence},
                 {"max_iterations", p.ransac.max_iterations},
                 {"rng_seed", p.ransac.rng_seed},
                 {"subsample_stride", p.ransac.subsample_stride},
                 {"refit_rounds", p.ransac.refit_rounds}};
  j["wba"] = {{"max_iterations", p.wba.max_iterations},
              {"step_tolerance", p.wba.step_tolerance},
              {"damping_init", p.wba.damping_init},
              {"gamma", p.wba.gamma},
              {"huber_delta", p.wba.huber_delta ? json(*p.wba.huber_delta) : json(nullptr)},
              {"min_inverse_depth", p.wba.min_inverse_depth},
              {"max_inverse_depth", p.wba.max_inverse_depth},
              {"min_active_pixels", p.wba.min_active_pixels}};
  j["refine"] = {{"sigma", p.refine.sigma},
                 {"outer_iterations", p.refine.outer_iterations},
                 {"mixup_alpha", p.refine.mixup_alpha}};
  j["confidence"] = {{"radius", p.confidence.radius},
                     {"grid_filter", p.confidence.grid_filter},
                     {"grid_cell", p.confidence.grid_cell},
                     {"grid_quantile", p.confidence.grid_quantile}};
  j["pipeline"] = {{"mask_mode", to_string(p.mask_mode)},
                   {"backward_inliers", to_string(p.backward_inliers)},
                   {"bidirectional", p.bidirectional},
                   {"ransac_min_confidence", p.ransac_min_confidence}};
  const auto& s = cfg.scene;
  j["scene"] = {{"width", s.width},
                {"height", s.height},
                {"focal", s.focal},
                {"rng_seed", s.rng_seed},
                {"depth",
                 {{"kind", to_string(s.depth.kind)},
                  {"base_depth", s.depth.base_depth},
                  {"amplitude", s.depth.amplitude},
                  {"slope_x", s.depth.slope_x},
                  {"slope_y", s.depth.slope_y},
                  {"planes", s.depth.planes},
                  {"octaves", s.depth.octaves},
                  {"feature_pixels", s.depth.feature_pixels}}},
                {"pose",
                 {{"rotation_deg", s.pose.rotation_deg},
                  {"rotation_axis", vec_json(s.pose.rotation_axis)},
                  {"translation", s.pose.translation},
                  {"translation_dir", vec_json(s.pose.translation_dir)}}}};
  const auto& c = cfg.corruption;
  j["corruption"] = {{"noise_sigma", c.noise_sigma},
                     {"outlier_rate", c.outlier_rate},
                     {"confidence_model", to_string(c.confidence_model)},
                     {"oracle_scale", c.oracle_scale},
                     {"constant_confidence", c.constant_confidence},
                     {"confidence_radius", c.confidence_radius},
                     {"rng_seed", c.rng_seed}};
  return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(io::read_json(path));
}

}  // namespace dtvsfm
