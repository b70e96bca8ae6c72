/******************************************************************************
 * Copyright 2026 The lrfusion Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#include "lrfusion/error.hpp"

namespace lrfusion {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPositionAtOrigin: return "PositionAtOrigin";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kGridShapeMismatch: return "GridShapeMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kStaticDetection: return "StaticDetection";
    case ErrorCode::kStaticTarget: return "StaticTarget";
    case ErrorCode::kNoTrainingPairs: return "NoTrainingPairs";
    case ErrorCode::kNoTruePositives: return "NoTruePositives";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kCheckpointMissing: return "CheckpointMissing";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code) {}

}  // namespace lrfusion
