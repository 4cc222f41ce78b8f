// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/mesh.hpp"

#include "gmp/error.hpp"

#include <sstream>

namespace gmp {

Vec3 TriangleMesh::face_cross(std::size_t face) const {
    const Vec3 a = corner(face, 0);
    return (corner(face, 1) - a).cross(corner(face, 2) - a);
}

double TriangleMesh::surface_area() const {
    double total = 0.0;
    for (std::size_t f = 0; f < faces.size(); ++f) total += face_area(f);
    return total;
}

Vec3 TriangleMesh::vertex_centroid() const {
    Vec3 sum = Vec3::Zero();
    for (const Vec3& v : vertices) sum += v;
    return vertices.empty() ? sum : Vec3(sum / static_cast<double>(vertices.size()));
}

void validate(const TriangleMesh& mesh) {
    const auto n = static_cast<int>(mesh.vertices.size());
    if (mesh.label < 0) fail(ErrorCode::InvalidMesh, "negative mesh label");
    for (const Vec3& v : mesh.vertices) {
        if (!v.allFinite()) fail(ErrorCode::InvalidMesh, "non-finite vertex");
    }
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        std::ostringstream os;
        os << "mesh " << mesh.label << " face " << f;
        for (int idx : face) {
            if (idx < 0 || idx >= n) fail(ErrorCode::InvalidMesh, os.str() + ": vertex index out of range");
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
            fail(ErrorCode::InvalidMesh, os.str() + ": repeated vertex index");
        }
        if (!(mesh.face_area(f) > kMinFaceArea)) fail(ErrorCode::InvalidMesh, os.str() + ": zero area");
    }
}

TriangleMesh transform_mesh(const TriangleMesh& mesh, const Pose& motion) {
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v = motion.apply(v);
    return out;
}

// Region-based closest point (Ericson, Real-Time Collision Detection 5.1.5).
ClosestPoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    auto result = [&](double u, double v, double w) {
        const Vec3 q = u * a + v * b + w * c;
        return ClosestPoint{q, Vec3(u, v, w), (p - q).squaredNorm()};
    };
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return result(1, 0, 0);

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return result(0, 1, 0);

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        return result(1.0 - v, v, 0);
    }

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return result(0, 0, 1);

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        return result(1.0 - w, 0, w);
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return result(0, 1.0 - w, w);
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom;
    const double w = vc * denom;
    return result(1.0 - v - w, v, w);
}

} // namespace gmp
