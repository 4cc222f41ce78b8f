// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gmp/geometry.hpp"

#include <array>
#include <vector>

namespace gmp {

using Face = std::array<int, 3>;

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    int label = 0;

    Vec3 corner(std::size_t face, int k) const { return vertices[static_cast<std::size_t>(faces[face][k])]; }
    /// Unnormalized (v1 - v0) x (v2 - v0).
    Vec3 face_cross(std::size_t face) const;
    Vec3 face_normal(std::size_t face) const { return face_cross(face).normalized(); }
    double face_area(std::size_t face) const { return 0.5 * face_cross(face).norm(); }
    double surface_area() const;
    Vec3 vertex_centroid() const;
};

inline constexpr double kMinFaceArea = 1e-12;

/// Throws InvalidMesh on out-of-range or repeated indices and zero-area faces.
void validate(const TriangleMesh& mesh);

TriangleMesh transform_mesh(const TriangleMesh& mesh, const Pose& motion);

struct ClosestPoint {
    Vec3 point;
    Vec3 barycentric;
    double distance_squared;
};

/// Closest point on triangle (a, b, c) to p, with barycentrics of that point.
ClosestPoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

} // namespace gmp
