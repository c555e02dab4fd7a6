// Copyright 2026 The tbswitch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tbswitch {

enum class ErrorCode {
    NonUnitaryMatrix,
    TruncationOverflow,
    ModeCollision,
    EmptyProjection,
    DimensionTooLarge,
    UnknownTimeBin,
    TimeBinOverflow,
    ZeroStarts,
    InsufficientPoints,
    DegeneratePhases,
    NotSinglePhotonInput,
    InvalidArgument,
    InvalidConfig,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonUnitaryMatrix: return "NonUnitaryMatrix";
    case ErrorCode::TruncationOverflow: return "TruncationOverflow";
    case ErrorCode::ModeCollision: return "ModeCollision";
    case ErrorCode::EmptyProjection: return "EmptyProjection";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::UnknownTimeBin: return "UnknownTimeBin";
    case ErrorCode::TimeBinOverflow: return "TimeBinOverflow";
    case ErrorCode::ZeroStarts: return "ZeroStarts";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::DegeneratePhases: return "DegeneratePhases";
    case ErrorCode::NotSinglePhotonInput: return "NotSinglePhotonInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind rather than the message.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what),
          code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

} // namespace tbswitch
