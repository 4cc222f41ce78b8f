// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gmp/geometry.hpp"

#include <json.hpp>

#include <string>

namespace gmp::json_io {

using Json = nlohmann::json;

Json to_json(const Vec3& v);
Json to_json(const Mat3& m); // row-major 9-array
/// {"rotation": [9], "translation": [3]}
Json to_json(const Pose& p);

// Readers throw ParseError that names `where`.
Vec3 vec3(const Json& j, const std::string& where);
Mat3 mat3(const Json& j, const std::string& where);
/// Accepts {"rotation": [9] | "quaternion": [w,x,y,z], "translation": [3]}.
Pose pose(const Json& j, const std::string& where);
double number(const Json& j, const std::string& key, const std::string& where);
double number_or(const Json& j, const std::string& key, double fallback, const std::string& where);
int integer(const Json& j, const std::string& key, const std::string& where);
const Json& member(const Json& j, const std::string& key, const std::string& where);

} // namespace gmp::json_io
