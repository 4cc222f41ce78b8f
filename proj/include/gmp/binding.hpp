// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gmp/geometry.hpp"
#include "gmp/mesh.hpp"

#include <map>
#include <span>
#include <utility>
#include <vector>

namespace gmp {

/// Attachment of one Gaussian to a face of the mesh carrying its label.
///
/// The anchor is sum_i barycentric_i * v_i (the closest point on the face)
/// plus normal_offset along the unit face normal plus tangent_offset in the
/// face frame (e1 = unit(v1 - v0), e2 = n x e1). tangent_offset is zero
/// whenever the center projects inside the face; it is only nonzero for
/// centers that sit outside every face's normal prism.
struct BindingRecord {
    int gaussian_index = 0;
    int label = 0;
    int face_index = 0;
    Vec3 barycentric = Vec3(1.0, 0.0, 0.0);
    double normal_offset = 0.0;
    Vec2 tangent_offset = Vec2::Zero();
};

struct BindingMap {
    std::vector<BindingRecord> records; // records[i].gaussian_index == i
    std::map<int, std::size_t> mesh_of_label;

    const BindingRecord& record(int gaussian_index) const;
};

/// Orthonormal frame (e1, e2, n) of a face, columns in that order.
Mat3 face_frame(const TriangleMesh& mesh, std::size_t face);

Vec3 anchor_point(const TriangleMesh& mesh, const BindingRecord& record);

/// Binds each point to the closest face of the mesh with the same label.
/// Ties go to the lowest face index.
BindingMap build_binding(std::span<const Vec3> centers, std::span<const int> labels,
                         std::span<const TriangleMesh> meshes);
BindingMap build_binding(std::span<const GaussianPrimitive> gaussians, std::span<const TriangleMesh> meshes);
BindingMap build_binding(std::span<const SurfelPrimitive> surfels, std::span<const TriangleMesh> meshes);

/// Anchor of Gaussian g_index reconstructed on `meshes`.
Vec3 bound_anchor(std::span<const TriangleMesh> meshes, const BindingMap& binding, int g_index);

struct Reprojection {
    Vec2 pixel;
    int face_index;
};

/// pi o mu: projects the mesh-anchored position of a bound Gaussian.
Reprojection reproject_gaussian(const Camera& camera, std::span<const TriangleMesh> meshes,
                                const BindingMap& binding, int g_index);

/// Rigidly moves every primitive carrying `label`; others are copied as-is.
std::vector<GaussianPrimitive> apply_instance_transform(std::span<const GaussianPrimitive> gaussians, int label,
                                                        const Pose& motion);
std::vector<SurfelPrimitive> apply_instance_transform(std::span<const SurfelPrimitive> surfels, int label,
                                                      const Pose& motion);

/// Re-anchors Gaussians on already-moved meshes. Centers come from the
/// binding; covariance and radiance rotation follow motions[label]. Labels
/// without an entry are left untouched.
std::vector<GaussianPrimitive> deform_bound_gaussians(std::span<const GaussianPrimitive> gaussians,
                                                      std::span<const TriangleMesh> posed_meshes,
                                                      const BindingMap& binding,
                                                      const std::map<int, Pose>& motions);

} // namespace gmp
