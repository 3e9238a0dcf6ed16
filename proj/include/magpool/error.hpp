/*
Copyright 2026 The magpool Authors

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

#include <stdexcept>
#include <string>
#include <string_view>

namespace magpool {

enum class ErrorCode {
    EdgeNotFound,
    InvalidTrace,
    ShapeMismatch,
    InvalidGraph,
    IndexOutOfRange,
    ConvergenceFailure,
    IllConditioned,
    SizeLimitExceeded,
    InsufficientData,
    InvalidParams,
    MissingFile,
    MalformedLine,
    IoFailure,
    SchemaMismatch,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::EdgeNotFound: return "EdgeNotFound";
    case ErrorCode::InvalidTrace: return "InvalidTrace";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::SizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    }
    return "Unknown";
}

/// Numerical failures (as opposed to bad input) map to a distinct CLI exit code.
constexpr bool is_numerical(ErrorCode code) {
    return code == ErrorCode::ConvergenceFailure || code == ErrorCode::IllConditioned;
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace magpool
