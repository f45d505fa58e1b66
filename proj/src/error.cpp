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

#include "dtvsfm/error.hpp"

namespace dtvsfm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAngleNearPi: return "AngleNearPi";
    case ErrorCode::kNonPositiveInputDepth: return "NonPositiveInputDepth";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidMixture: return "InvalidMixture";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInsufficientMatches: return "InsufficientMatches";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kNoValidPixels: return "NoValidPixels";
    case ErrorCode::kZeroTranslation: return "ZeroTranslation";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace dtvsfm
