// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/error.hpp"

namespace gmp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::PointBehindCamera: return "PointBehindCamera";
    case ErrorCode::NotSPD: return "NotSPD";
    case ErrorCode::InvalidPrimitive: return "InvalidPrimitive";
    case ErrorCode::InvalidMesh: return "InvalidMesh";
    case ErrorCode::UnmatchedLabel: return "UnmatchedLabel";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::IKNoConvergence: return "IKNoConvergence";
    case ErrorCode::SingularInertia: return "SingularInertia";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::DegenerateHints: return "DegenerateHints";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::EmptyGeometry: return "EmptyGeometry";
    case ErrorCode::MissingMesh: return "MissingMesh";
    case ErrorCode::NoChain: return "NoChain";
    case ErrorCode::CyclicJointGraph: return "CyclicJointGraph";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

} // namespace gmp
