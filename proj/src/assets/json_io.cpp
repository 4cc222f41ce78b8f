// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/json_io.hpp"

#include "gmp/error.hpp"

namespace gmp::json_io {

Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json to_json(const Mat3& m) {
    Json out = Json::array();
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) out.push_back(m(r, c));
    }
    return out;
}

Json to_json(const Pose& p) { return Json{{"rotation", to_json(p.rotation)}, {"translation", to_json(p.translation)}}; }

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    fail(ErrorCode::ParseError, "field '" + where + "': " + what);
}

std::vector<double> numbers(const Json& j, std::size_t n, const std::string& where) {
    if (!j.is_array() || j.size() != n) bad(where, "expected an array of " + std::to_string(n) + " numbers");
    std::vector<double> out;
    for (const auto& e : j) {
        if (!e.is_number()) bad(where, "expected a number");
        out.push_back(e.get<double>());
    }
    return out;
}

} // namespace

Vec3 vec3(const Json& j, const std::string& where) {
    const auto v = numbers(j, 3, where);
    return {v[0], v[1], v[2]};
}

Mat3 mat3(const Json& j, const std::string& where) {
    const auto v = numbers(j, 9, where);
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m(r, c) = v[static_cast<std::size_t>(3 * r + c)];
    }
    return m;
}

Pose pose(const Json& j, const std::string& where) {
    if (!j.is_object()) bad(where, "expected a pose object");
    const Vec3 t = j.contains("translation") ? vec3(j["translation"], where + ".translation") : Vec3::Zero();
    if (j.contains("rotation")) {
        const Mat3 R = mat3(j["rotation"], where + ".rotation");
        if (is_rotation(R, 1e-12)) return {R, t};
        if (!is_rotation(R, 1e-6)) bad(where + ".rotation", "not a rotation matrix");
        return {orthonormalize(R), t};
    }
    if (j.contains("quaternion")) {
        const auto q = numbers(j["quaternion"], 4, where + ".quaternion");
        return Pose::from_quaternion(Eigen::Vector4d(q[0], q[1], q[2], q[3]), t);
    }
    return Pose::from_translation(t);
}

const Json& member(const Json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) bad(where + "." + key, "missing");
    return j[key];
}

double number(const Json& j, const std::string& key, const std::string& where) {
    const Json& v = member(j, key, where);
    if (!v.is_number()) bad(where + "." + key, "expected a number");
    return v.get<double>();
}

double number_or(const Json& j, const std::string& key, double fallback, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return number(j, key, where);
}

int integer(const Json& j, const std::string& key, const std::string& where) {
    const Json& v = member(j, key, where);
    if (!v.is_number_integer()) bad(where + "." + key, "expected an integer");
    return v.get<int>();
}

} // namespace gmp::json_io
