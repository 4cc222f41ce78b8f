// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/error.hpp"
#include "gmp/scene.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace gmp {

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Resolves a 1-based (or negative, relative) OBJ index token "i[/t[/n]]".
int obj_index(const std::string& token, int vertex_count, const std::string& where) {
    const std::string head = token.substr(0, token.find('/'));
    int idx = 0;
    const auto res = std::from_chars(head.data(), head.data() + head.size(), idx);
    if (res.ec != std::errc() || res.ptr != head.data() + head.size() || idx == 0) {
        fail(ErrorCode::ParseError, where + ": bad face index '" + token + "'");
    }
    return idx > 0 ? idx - 1 : vertex_count + idx;
}

} // namespace

TriangleMesh read_obj(const std::filesystem::path& path, int label) {
    std::ifstream is(path);
    if (!is) fail(ErrorCode::IoError, "cannot read " + path.string());
    TriangleMesh mesh;
    mesh.label = label;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x() >> v.y() >> v.z())) fail(ErrorCode::ParseError, where + ": bad vertex");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string token;
            while (ls >> token) poly.push_back(obj_index(token, static_cast<int>(mesh.vertices.size()), where));
            if (poly.size() < 3) fail(ErrorCode::ParseError, where + ": face with fewer than 3 vertices");
            for (std::size_t k = 1; k + 1 < poly.size(); ++k) mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
        }
    }
    validate(mesh);
    return mesh;
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
    std::ofstream os(path);
    if (!os) fail(ErrorCode::IoError, "cannot write " + path.string());
    os << "# label " << mesh.label << "\n";
    for (const Vec3& v : mesh.vertices) {
        os << "v " << format_double(v.x()) << " " << format_double(v.y()) << " " << format_double(v.z()) << "\n";
    }
    for (const Face& f : mesh.faces) os << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
}

} // namespace gmp
