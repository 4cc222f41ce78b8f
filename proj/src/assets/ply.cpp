// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/error.hpp"
#include "gmp/scene.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace gmp {

static_assert(std::endian::native == std::endian::little, "PLY I/O assumes a little-endian host");

namespace {

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

PlyType parse_type(const std::string& name, const std::string& where) {
    static const std::map<std::string, PlyType> kTypes{
        {"char", PlyType::Int8},     {"int8", PlyType::Int8},       {"uchar", PlyType::UInt8},
        {"uint8", PlyType::UInt8},   {"short", PlyType::Int16},     {"int16", PlyType::Int16},
        {"ushort", PlyType::UInt16}, {"uint16", PlyType::UInt16},   {"int", PlyType::Int32},
        {"int32", PlyType::Int32},   {"uint", PlyType::UInt32},     {"uint32", PlyType::UInt32},
        {"float", PlyType::Float32}, {"float32", PlyType::Float32}, {"double", PlyType::Float64},
        {"float64", PlyType::Float64}};
    const auto it = kTypes.find(name);
    if (it == kTypes.end()) fail(ErrorCode::ParseError, where + ": unknown PLY type '" + name + "'");
    return it->second;
}

std::size_t type_size(PlyType t) {
    switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
    }
    return 0;
}

template <typename T>
T load(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return v;
}

double read_value(PlyType t, const char* p) {
    switch (t) {
    case PlyType::Int8: return load<std::int8_t>(p);
    case PlyType::UInt8: return load<std::uint8_t>(p);
    case PlyType::Int16: return load<std::int16_t>(p);
    case PlyType::UInt16: return load<std::uint16_t>(p);
    case PlyType::Int32: return load<std::int32_t>(p);
    case PlyType::UInt32: return load<std::uint32_t>(p);
    case PlyType::Float32: return load<float>(p);
    case PlyType::Float64: return load<double>(p);
    }
    return 0.0;
}

struct Property {
    std::string name;
    PlyType type;
    std::size_t offset;
};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

} // namespace

std::vector<GaussianPrimitive> read_gaussian_ply(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorCode::IoError, "cannot read " + path.string());
    const std::string where = path.string();

    std::string line;
    std::getline(is, line);
    if (line != "ply") fail(ErrorCode::ParseError, where + ": missing 'ply' magic");
    std::size_t count = 0;
    bool in_vertex = false;
    bool seen_vertex = false;
    std::vector<Property> props;
    std::size_t stride = 0;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string at = where + ":" + std::to_string(line_no);
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "end_header") break;
        if (tag == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt != "binary_little_endian") fail(ErrorCode::ParseError, at + ": only binary_little_endian is supported");
        } else if (tag == "element") {
            std::string name;
            ls >> name >> count;
            if (seen_vertex) fail(ErrorCode::ParseError, at + ": elements after 'vertex' are not supported");
            in_vertex = name == "vertex";
            if (!in_vertex) fail(ErrorCode::ParseError, at + ": unsupported element '" + name + "'");
            seen_vertex = true;
        } else if (tag == "property") {
            std::string type, name;
            ls >> type >> name;
            if (type == "list") fail(ErrorCode::ParseError, at + ": list properties are not supported");
            const PlyType t = parse_type(type, at);
            props.push_back({name, t, stride});
            stride += type_size(t);
        }
    }
    if (!seen_vertex) fail(ErrorCode::ParseError, where + ": no vertex element");

    std::map<std::string, const Property*> by_name;
    for (const auto& p : props) by_name[p.name] = &p;
    auto need = [&](const std::string& name) {
        const auto it = by_name.find(name);
        if (it == by_name.end()) fail(ErrorCode::ParseError, where + ": missing property '" + name + "'");
        return it->second;
    };
    auto maybe = [&](const std::string& name) -> const Property* {
        const auto it = by_name.find(name);
        return it == by_name.end() ? nullptr : it->second;
    };

    std::size_t rest = 0;
    while (maybe("f_rest_" + std::to_string(rest))) ++rest;
    if (rest % 3 != 0) fail(ErrorCode::ParseError, where + ": f_rest count is not a multiple of 3");
    const std::size_t per_channel = rest / 3 + 1;
    if (sh_degree_from_count(per_channel) < 0) fail(ErrorCode::ParseError, where + ": SH count is not (L+1)^2");

    const Property* xyz[3] = {need("x"), need("y"), need("z")};
    const Property* dc[3] = {need("f_dc_0"), need("f_dc_1"), need("f_dc_2")};
    const Property* opacity = need("opacity");
    const Property* scale[3] = {need("scale_0"), need("scale_1"), need("scale_2")};
    const Property* rot[4] = {need("rot_0"), need("rot_1"), need("rot_2"), need("rot_3")};
    const Property* label = maybe("instance_id");
    const Property* shrot[4] = {maybe("sh_rot_0"), maybe("sh_rot_1"), maybe("sh_rot_2"), maybe("sh_rot_3")};
    const Property* cov[6] = {maybe("cov_xx"), maybe("cov_xy"), maybe("cov_xz"),
                              maybe("cov_yy"), maybe("cov_yz"), maybe("cov_zz")};
    const bool exact_cov = cov[0] && cov[1] && cov[2] && cov[3] && cov[4] && cov[5];
    const Property* linear_opacity = maybe("opacity_linear");

    std::vector<char> data(count * stride);
    if (!is.read(data.data(), static_cast<std::streamsize>(data.size()))) {
        fail(ErrorCode::ParseError, where + ": truncated vertex data");
    }

    std::vector<GaussianPrimitive> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const char* row = data.data() + i * stride;
        auto get = [&](const Property* p) { return read_value(p->type, row + p->offset); };
        GaussianPrimitive& g = out[i];
        g.center = Vec3(get(xyz[0]), get(xyz[1]), get(xyz[2]));
        g.sh.assign(per_channel, Vec3::Zero());
        g.sh[0] = Vec3(get(dc[0]), get(dc[1]), get(dc[2]));
        for (std::size_t k = 1; k < per_channel; ++k) {
            for (std::size_t c = 0; c < 3; ++c) {
                g.sh[k][static_cast<Eigen::Index>(c)] = get(by_name.at("f_rest_" + std::to_string(c * (per_channel - 1) + k - 1)));
            }
        }
        g.opacity = linear_opacity ? get(linear_opacity) : sigmoid(get(opacity));
        if (exact_cov) {
            g.covariance << get(cov[0]), get(cov[1]), get(cov[2]),
                            get(cov[1]), get(cov[3]), get(cov[4]),
                            get(cov[2]), get(cov[4]), get(cov[5]);
        } else {
            const Vec3 s(std::exp(get(scale[0])), std::exp(get(scale[1])), std::exp(get(scale[2])));
            const Mat3 R = Pose::from_quaternion(Eigen::Vector4d(get(rot[0]), get(rot[1]), get(rot[2]), get(rot[3])),
                                                 Vec3::Zero()).rotation;
            g.covariance = R * s.cwiseProduct(s).asDiagonal() * R.transpose();
            g.covariance = 0.5 * (g.covariance + g.covariance.transpose());
        }
        g.label = label ? static_cast<int>(get(label)) : 0;
        if (shrot[0] && shrot[1] && shrot[2] && shrot[3]) {
            g.sh_rotation = Pose::from_quaternion(
                Eigen::Vector4d(get(shrot[0]), get(shrot[1]), get(shrot[2]), get(shrot[3])), Vec3::Zero()).rotation;
        }
    }
    return out;
}

void write_gaussian_ply(const std::filesystem::path& path, const std::vector<GaussianPrimitive>& gaussians, int sh_degree) {
    const auto per_channel = static_cast<std::size_t>(sh_coeff_count(sh_degree));
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorCode::IoError, "cannot write " + path.string());
    os << "ply\nformat binary_little_endian 1.0\nelement vertex " << gaussians.size() << "\n";
    os << "property double x\nproperty double y\nproperty double z\n";
    for (int c = 0; c < 3; ++c) os << "property double f_dc_" << c << "\n";
    for (std::size_t k = 0; k < 3 * (per_channel - 1); ++k) os << "property double f_rest_" << k << "\n";
    os << "property double opacity\n";
    for (int c = 0; c < 3; ++c) os << "property double scale_" << c << "\n";
    for (int c = 0; c < 4; ++c) os << "property double rot_" << c << "\n";
    os << "property int instance_id\n";
    for (int c = 0; c < 4; ++c) os << "property double sh_rot_" << c << "\n";
    // Exact opacity and covariance; opacity, scale and rot above are derived
    // from them for other readers.
    os << "property double opacity_linear\n";
    for (const char* name : {"cov_xx", "cov_xy", "cov_xz", "cov_yy", "cov_yz", "cov_zz"}) {
        os << "property double " << name << "\n";
    }
    os << "end_header\n";

    std::string bytes;
    auto put = [&](auto v) {
        char buf[sizeof(v)];
        std::memcpy(buf, &v, sizeof(v));
        bytes.append(buf, sizeof(v));
    };
    for (const auto& g : gaussians) {
        if (g.sh.size() != per_channel) {
            fail(ErrorCode::InvalidPrimitive, "Gaussian SH degree differs from the scene degree");
        }
        if (!is_spd(g.covariance)) fail(ErrorCode::NotSPD, "cannot serialize a non-SPD covariance");
        bytes.clear();
        put(g.center.x());
        put(g.center.y());
        put(g.center.z());
        for (int c = 0; c < 3; ++c) put(g.sh[0][c]);
        for (int c = 0; c < 3; ++c) {
            for (std::size_t k = 1; k < per_channel; ++k) put(g.sh[k][c]);
        }
        put(logit(g.opacity));
        Eigen::SelfAdjointEigenSolver<Mat3> es(g.covariance);
        Mat3 V = es.eigenvectors();
        if (V.determinant() < 0.0) V.col(2) *= -1.0;
        for (int c = 0; c < 3; ++c) put(0.5 * std::log(es.eigenvalues()[c]));
        const auto q = Pose::from_rotation(V).quaternion_wxyz();
        for (int c = 0; c < 4; ++c) put(q[c]);
        put(static_cast<std::int32_t>(g.label));
        const auto qs = Pose::from_rotation(g.sh_rotation).quaternion_wxyz();
        for (int c = 0; c < 4; ++c) put(qs[c]);
        put(g.opacity);
        const Mat3& C = g.covariance;
        for (double v : {C(0, 0), C(0, 1), C(0, 2), C(1, 1), C(1, 2), C(2, 2)}) put(v);
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
}

} // namespace gmp
