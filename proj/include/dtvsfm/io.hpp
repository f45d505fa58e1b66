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
#include <vector>

#include <json.hpp>

#include "dtvsfm/geometry.hpp"
#include "dtvsfm/uncertainty.hpp"

namespace dtvsfm::io {

/// Components above this magnitude (or NaN) mark an invalid flow vector.
inline constexpr float kInvalidFlowThreshold = 1e9f;
inline constexpr float kInvalidFlowValue = 1e10f;

/// Middlebury .flo: "PIEH", int32 width, int32 height, then interleaved
/// little-endian float32 (u, v), row-major.
std::string encode_flow(const FlowField& flow);
FlowField decode_flow(const std::string& bytes);
void write_flow(const std::filesystem::path& path, const FlowField& flow);
FlowField read_flow(const std::filesystem::path& path);

struct ScalarMap {
  Grid<double> values;
  ByteGrid valid;  // 0 where the file holds NaN
};

/// Grayscale PFM ("Pf"), rows stored bottom-to-top. Written little-endian
/// (scale -1). On read the values are multiplied by |scale|.
std::string encode_pfm(const Grid<double>& values, const ByteGrid* valid = nullptr);
ScalarMap decode_pfm(const std::string& bytes);
void write_pfm(const std::filesystem::path& path, const Grid<double>& values,
               const ByteGrid* valid = nullptr);
ScalarMap read_pfm(const std::filesystem::path& path);

void write_depth(const std::filesystem::path& path, const DepthMap& depth);
DepthMap read_depth(const std::filesystem::path& path);
/// NaN entries read as confidence 0.
ConfidenceMap read_confidence(const std::filesystem::path& path);

nlohmann::json pose_to_json(const PoseSE3& pose);
/// Throws kConfigError for malformed records or a non-orthonormal rotation.
PoseSE3 pose_from_json(const nlohmann::json& j);
nlohmann::json intrinsics_to_json(const CameraIntrinsics& k);
CameraIntrinsics intrinsics_from_json(const nlohmann::json& j);

void write_pose(const std::filesystem::path& path, const PoseSE3& pose);
PoseSE3 read_pose(const std::filesystem::path& path);
/// A file holding one pose record or an array of them.
std::vector<PoseSE3> read_poses(const std::filesystem::path& path);
void write_intrinsics(const std::filesystem::path& path, const CameraIntrinsics& k);
CameraIntrinsics read_intrinsics(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);
nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace dtvsfm::io
