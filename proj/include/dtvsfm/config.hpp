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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dtvsfm/refine.hpp"
#include "dtvsfm/synth.hpp"

namespace dtvsfm {

/// Every tunable in one JSON document with sections "ransac", "wba",
/// "refine", "confidence", "pipeline", "scene" and "corruption". Missing keys
/// keep their defaults; unknown keys are rejected with kConfigError.
struct RunConfig {
  PipelineConfig pipeline;
  SceneConfig scene;
  CorruptionConfig corruption;

  void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::filesystem::path& path);

std::string to_string(MaskMode mode);
std::string to_string(BackwardInliers mode);
std::string to_string(DepthModelKind kind);
std::string to_string(ConfidenceModel model);

}  // namespace dtvsfm
