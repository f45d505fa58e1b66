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

#include "dtvsfm/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "dtvsfm/error.hpp"

namespace dtvsfm::io {

namespace {

template <typename T>
T byteswap_value(T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  std::memcpy(&v, b, sizeof(T));
  return v;
}

template <typename T>
void put(std::string& out, T v, std::endian order) {
  if (order != std::endian::native) v = byteswap_value(v);
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t offset, std::endian order) {
  T v;
  std::memcpy(&v, in.data() + offset, sizeof(T));
  if (order != std::endian::native) v = byteswap_value(v);
  return v;
}

constexpr char kFlowMagic[4] = {'P', 'I', 'E', 'H'};

std::string string_of(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    fail(ErrorCode::kConfigError, std::string("missing string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

double number_of(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number()) {
    fail(ErrorCode::kConfigError, std::string("missing numeric field '") + key + "'");
  }
  return j[key].get<double>();
}

constexpr const char* kPoseConvention =
    "T maps reference-camera coordinates to source-camera coordinates";

}  // namespace

std::string encode_flow(const FlowField& flow) {
  std::string out;
  out.reserve(12 + flow.flow.size() * 8);
  out.append(kFlowMagic, 4);
  put<std::int32_t>(out, flow.width(), std::endian::little);
  put<std::int32_t>(out, flow.height(), std::endian::little);
  for (std::size_t i = 0; i < flow.flow.size(); ++i) {
    float u = kInvalidFlowValue, v = kInvalidFlowValue;
    if (flow.is_valid(i)) {
      u = static_cast<float>(flow.flow[i].x());
      v = static_cast<float>(flow.flow[i].y());
    }
    put<float>(out, u, std::endian::little);
    put<float>(out, v, std::endian::little);
  }
  return out;
}

FlowField decode_flow(const std::string& bytes) {
  if (bytes.size() < 4) fail(ErrorCode::kTruncatedFile, "flow file shorter than its magic");
  if (std::memcmp(bytes.data(), kFlowMagic, 4) != 0) {
    fail(ErrorCode::kBadMagic, "flow file does not start with PIEH");
  }
  if (bytes.size() < 12) fail(ErrorCode::kTruncatedFile, "flow file header is truncated");
  const auto w = get<std::int32_t>(bytes, 4, std::endian::little);
  const auto h = get<std::int32_t>(bytes, 8, std::endian::little);
  if (w <= 0 || h <= 0) fail(ErrorCode::kMalformedHeader, "flow file dimensions must be positive");
  const std::size_t need = 12 + static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 8;
  if (bytes.size() < need) fail(ErrorCode::kTruncatedFile, "flow file payload is truncated");
  FlowField flow(w, h);
  for (std::size_t i = 0; i < flow.flow.size(); ++i) {
    const float u = get<float>(bytes, 12 + 8 * i, std::endian::little);
    const float v = get<float>(bytes, 16 + 8 * i, std::endian::little);
    const bool bad = !(std::abs(u) <= kInvalidFlowThreshold) || !(std::abs(v) <= kInvalidFlowThreshold);
    flow.valid[i] = bad ? 0 : 1;
    flow.flow[i] = bad ? Vec2::Zero() : Vec2(u, v);
  }
  return flow;
}

std::string encode_pfm(const Grid<double>& values, const ByteGrid* valid) {
  std::ostringstream header;
  header << "Pf\n" << values.width() << " " << values.height() << "\n-1.0\n";
  std::string out = header.str();
  out.reserve(out.size() + values.size() * 4);
  for (int y = values.height() - 1; y >= 0; --y) {
    for (int x = 0; x < values.width(); ++x) {
      float v = static_cast<float>(values(x, y));
      if (valid != nullptr && (*valid)(x, y) == 0) v = std::numeric_limits<float>::quiet_NaN();
      put<float>(out, v, std::endian::little);
    }
  }
  return out;
}

ScalarMap decode_pfm(const std::string& bytes) {
  std::size_t pos = 0;
  auto skip_space = [&]() {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  };
  auto token = [&]() {
    skip_space();
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos == start) fail(ErrorCode::kMalformedHeader, "PFM header is incomplete");
    return bytes.substr(start, pos - start);
  };
  if (bytes.size() < 2) fail(ErrorCode::kTruncatedFile, "PFM file is empty");
  if (bytes.compare(0, 2, "Pf") != 0 ||
      (bytes.size() > 2 && !std::isspace(static_cast<unsigned char>(bytes[2])))) {
    fail(ErrorCode::kBadMagic, "PFM file does not start with Pf");
  }
  pos = 2;
  int w = 0, h = 0;
  double scale = 0.0;
  try {
    std::size_t used = 0;
    const std::string ws = token();
    w = std::stoi(ws, &used);
    if (used != ws.size()) throw std::invalid_argument("width");
    const std::string hs = token();
    h = std::stoi(hs, &used);
    if (used != hs.size()) throw std::invalid_argument("height");
    const std::string ss = token();
    scale = std::stod(ss, &used);
    if (used != ss.size()) throw std::invalid_argument("scale");
  } catch (const std::logic_error&) {
    fail(ErrorCode::kMalformedHeader, "PFM header fields are not numbers");
  }
  if (w <= 0 || h <= 0 || scale == 0.0 || !std::isfinite(scale)) {
    fail(ErrorCode::kMalformedHeader, "PFM header has invalid dimensions or scale");
  }
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    fail(ErrorCode::kTruncatedFile, "PFM header is not terminated");
  }
  ++pos;  // single whitespace before the raster
  const std::endian order = scale < 0.0 ? std::endian::little : std::endian::big;
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 4;
  if (bytes.size() - pos < need) fail(ErrorCode::kTruncatedFile, "PFM raster is truncated");
  ScalarMap out{Grid<double>(w, h, 0.0), ByteGrid(w, h, 1)};
  const double mult = std::abs(scale);
  std::size_t off = pos;
  for (int y = h - 1; y >= 0; --y) {
    for (int x = 0; x < w; ++x, off += 4) {
      const float v = get<float>(bytes, off, order);
      if (std::isnan(v)) {
        out.valid(x, y) = 0;
        out.values(x, y) = 0.0;
      } else {
        out.values(x, y) = mult == 1.0 ? static_cast<double>(v) : static_cast<double>(v) * mult;
      }
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::kIoError, "cannot write " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(ErrorCode::kIoError, "short write to " + path.string());
}

void write_flow(const std::filesystem::path& path, const FlowField& flow) {
  write_file(path, encode_flow(flow));
}

FlowField read_flow(const std::filesystem::path& path) { return decode_flow(read_file(path)); }

void write_pfm(const std::filesystem::path& path, const Grid<double>& values, const ByteGrid* valid) {
  write_file(path, encode_pfm(values, valid));
}

ScalarMap read_pfm(const std::filesystem::path& path) { return decode_pfm(read_file(path)); }

void write_depth(const std::filesystem::path& path, const DepthMap& depth) {
  write_pfm(path, depth.depth, &depth.valid);
}

DepthMap read_depth(const std::filesystem::path& path) {
  ScalarMap m = read_pfm(path);
  DepthMap d;
  d.depth = std::move(m.values);
  d.valid = std::move(m.valid);
  for (std::size_t i = 0; i < d.depth.size(); ++i) {
    if (!(d.depth[i] > 0.0)) d.valid[i] = 0;
  }
  return d;
}

ConfidenceMap read_confidence(const std::filesystem::path& path) {
  ScalarMap m = read_pfm(path);
  ConfidenceMap c(m.values.width(), m.values.height(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!m.valid[i]) continue;
    if (!(m.values[i] >= 0.0 && m.values[i] <= 1.0)) {
      fail(ErrorCode::kConfigError, "confidence values must lie in [0, 1]: " + path.string());
    }
    c[i] = m.values[i];
  }
  return c;
}

nlohmann::json pose_to_json(const PoseSE3& pose) {
  nlohmann::json j;
  nlohmann::json r = nlohmann::json::array();
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) r.push_back(pose.rotation(row, col));
  }
  j["rotation"] = r;
  j["translation"] = {pose.translation.x(), pose.translation.y(), pose.translation.z()};
  j["convention"] = kPoseConvention;
  return j;
}

PoseSE3 pose_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::kConfigError, "pose record must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "rotation" && key != "translation" && key != "convention") {
      fail(ErrorCode::kConfigError, "unknown pose field '" + key + "'");
    }
  }
  if (!j.contains("rotation") || !j["rotation"].is_array() || j["rotation"].size() != 9 ||
      !j.contains("translation") || !j["translation"].is_array() || j["translation"].size() != 3) {
    fail(ErrorCode::kConfigError, "pose needs rotation[9] and translation[3]");
  }
  if (j.contains("convention") && string_of(j, "convention") != kPoseConvention) {
    fail(ErrorCode::kConfigError, "unsupported pose convention");
  }
  PoseSE3 p;
  for (int i = 0; i < 9; ++i) {
    if (!j["rotation"][i].is_number()) fail(ErrorCode::kConfigError, "rotation entries must be numbers");
    p.rotation(i / 3, i % 3) = j["rotation"][i].get<double>();
  }
  for (int i = 0; i < 3; ++i) {
    if (!j["translation"][i].is_number()) {
      fail(ErrorCode::kConfigError, "translation entries must be numbers");
    }
    p.translation(i) = j["translation"][i].get<double>();
  }
  if (!p.is_valid()) fail(ErrorCode::kConfigError, "pose rotation is not orthonormal with det +1");
  return p;
}

nlohmann::json intrinsics_to_json(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
          {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics intrinsics_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::kConfigError, "intrinsics record must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "fx" && key != "fy" && key != "cx" && key != "cy" && key != "width" &&
        key != "height") {
      fail(ErrorCode::kConfigError, "unknown intrinsics field '" + key + "'");
    }
  }
  CameraIntrinsics k;
  k.fx = number_of(j, "fx");
  k.fy = number_of(j, "fy");
  k.cx = number_of(j, "cx");
  k.cy = number_of(j, "cy");
  if (!j.contains("width") || !j["width"].is_number_integer() || !j.contains("height") ||
      !j["height"].is_number_integer()) {
    fail(ErrorCode::kConfigError, "intrinsics width/height must be integers");
  }
  k.width = j["width"].get<int>();
  k.height = j["height"].get<int>();
  if (!k.is_valid()) fail(ErrorCode::kConfigError, "intrinsics violate their invariants");
  return k;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_file(path, j.dump(2) + "\n");
}

void write_pose(const std::filesystem::path& path, const PoseSE3& pose) {
  write_json(path, pose_to_json(pose));
}

PoseSE3 read_pose(const std::filesystem::path& path) { return pose_from_json(read_json(path)); }

std::vector<PoseSE3> read_poses(const std::filesystem::path& path) {
  const nlohmann::json j = read_json(path);
  std::vector<PoseSE3> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(pose_from_json(e));
  } else {
    out.push_back(pose_from_json(j));
  }
  return out;
}

void write_intrinsics(const std::filesystem::path& path, const CameraIntrinsics& k) {
  write_json(path, intrinsics_to_json(k));
}

CameraIntrinsics read_intrinsics(const std::filesystem::path& path) {
  return intrinsics_from_json(read_json(path));
}

}  // namespace dtvsfm::io
