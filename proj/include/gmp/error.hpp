// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gmp {

enum class ErrorCode {
    PointBehindCamera,
    NotSPD,
    InvalidPrimitive,
    InvalidMesh,
    UnmatchedLabel,
    EmptyMesh,
    ArityMismatch,
    IKNoConvergence,
    SingularInertia,
    InvalidArgument,
    ParseError,
    SchemaVersionMismatch,
    NonPositiveLength,
    DegenerateHints,
    EmptyResult,
    EmptyGeometry,
    MissingMesh,
    NoChain,
    CyclicJointGraph,
    InvalidBounds,
    IoError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

} // namespace gmp
