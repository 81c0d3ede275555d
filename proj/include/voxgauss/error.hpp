// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace voxgauss {

enum class ErrorCode {
    InvalidArgument,
    EmptyGrid,
    BadMagic,
    TruncatedStream,
    VersionMismatch,
    LengthMismatch,
    MalformedLine,
    EmptyPointSet,
    BadDims,
    UnorderedLevels,
    NotDense,
    EmptyLeaf,
    CenterOutsideScene,
    EmptyModel,
    DegenerateDirection,
    DimMismatch,
    IoFailure,
    UnknownDataset,
};

const char* to_string(ErrorCode code);

/// All library failures surface as this exception; `code()` identifies the
/// contract that was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedStream: return "TruncatedStream";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::EmptyPointSet: return "EmptyPointSet";
    case ErrorCode::BadDims: return "BadDims";
    case ErrorCode::UnorderedLevels: return "UnorderedLevels";
    case ErrorCode::NotDense: return "NotDense";
    case ErrorCode::EmptyLeaf: return "EmptyLeaf";
    case ErrorCode::CenterOutsideScene: return "CenterOutsideScene";
    case ErrorCode::EmptyModel: return "EmptyModel";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::UnknownDataset: return "UnknownDataset";
    }
    return "Unknown";
}

} // namespace voxgauss
