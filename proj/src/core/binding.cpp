// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/binding.hpp"

#include "gmp/error.hpp"
#include "gmp/parallel.hpp"

#include <limits>
#include <string>

namespace gmp {

const BindingRecord& BindingMap::record(int gaussian_index) const {
    if (gaussian_index < 0 || static_cast<std::size_t>(gaussian_index) >= records.size()) {
        fail(ErrorCode::UnmatchedLabel, "Gaussian " + std::to_string(gaussian_index) + " is not bound");
    }
    return records[static_cast<std::size_t>(gaussian_index)];
}

Mat3 face_frame(const TriangleMesh& mesh, std::size_t face) {
    const Vec3 n = mesh.face_normal(face);
    const Vec3 e1 = (mesh.corner(face, 1) - mesh.corner(face, 0)).normalized();
    Mat3 frame;
    frame.col(0) = e1;
    frame.col(1) = n.cross(e1);
    frame.col(2) = n;
    return frame;
}

Vec3 anchor_point(const TriangleMesh& mesh, const BindingRecord& record) {
    const auto f = static_cast<std::size_t>(record.face_index);
    const Vec3 on_face = record.barycentric[0] * mesh.corner(f, 0) + record.barycentric[1] * mesh.corner(f, 1) +
                         record.barycentric[2] * mesh.corner(f, 2);
    const Mat3 frame = face_frame(mesh, f);
    return on_face + record.tangent_offset[0] * frame.col(0) + record.tangent_offset[1] * frame.col(1) +
           record.normal_offset * frame.col(2);
}

BindingMap build_binding(std::span<const Vec3> centers, std::span<const int> labels,
                         std::span<const TriangleMesh> meshes) {
    if (centers.size() != labels.size()) fail(ErrorCode::InvalidArgument, "centers and labels differ in length");
    BindingMap map;
    for (std::size_t m = 0; m < meshes.size(); ++m) {
        if (!map.mesh_of_label.emplace(meshes[m].label, m).second) {
            fail(ErrorCode::InvalidMesh, "two meshes share label " + std::to_string(meshes[m].label));
        }
    }
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const auto it = map.mesh_of_label.find(labels[i]);
        if (it == map.mesh_of_label.end()) {
            fail(ErrorCode::UnmatchedLabel, "Gaussian " + std::to_string(i) + " has label " +
                                                std::to_string(labels[i]) + " with no mesh");
        }
        if (meshes[it->second].faces.empty()) {
            fail(ErrorCode::EmptyMesh, "mesh for label " + std::to_string(labels[i]) + " has no faces");
        }
    }

    map.records.resize(centers.size());
    parallel_for(centers.size(), [&](std::size_t i) {
        const TriangleMesh& mesh = meshes[map.mesh_of_label.at(labels[i])];
        const Vec3& x = centers[i];
        std::size_t best_face = 0;
        ClosestPoint best{Vec3::Zero(), Vec3::Zero(), std::numeric_limits<double>::infinity()};
        for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
            const ClosestPoint cp = closest_point_on_triangle(x, mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2));
            if (cp.distance_squared < best.distance_squared) {
                best = cp;
                best_face = f;
            }
        }
        const Mat3 frame = face_frame(mesh, best_face);
        const Vec3 residual = frame.transpose() * (x - best.point);
        BindingRecord& rec = map.records[i];
        rec.gaussian_index = static_cast<int>(i);
        rec.label = labels[i];
        rec.face_index = static_cast<int>(best_face);
        rec.barycentric = best.barycentric;
        rec.normal_offset = residual.z();
        rec.tangent_offset = residual.head<2>();
    });
    return map;
}

BindingMap build_binding(std::span<const GaussianPrimitive> gaussians, std::span<const TriangleMesh> meshes) {
    std::vector<Vec3> centers;
    std::vector<int> labels;
    centers.reserve(gaussians.size());
    labels.reserve(gaussians.size());
    for (const auto& g : gaussians) {
        centers.push_back(g.center);
        labels.push_back(g.label);
    }
    return build_binding(centers, labels, meshes);
}

BindingMap build_binding(std::span<const SurfelPrimitive> surfels, std::span<const TriangleMesh> meshes) {
    std::vector<Vec3> centers;
    std::vector<int> labels;
    for (const auto& s : surfels) {
        centers.push_back(s.center);
        labels.push_back(s.label);
    }
    return build_binding(centers, labels, meshes);
}

namespace {

const TriangleMesh& mesh_for(std::span<const TriangleMesh> meshes, const BindingMap& binding,
                             const BindingRecord& rec) {
    const auto it = binding.mesh_of_label.find(rec.label);
    if (it == binding.mesh_of_label.end() || it->second >= meshes.size()) {
        fail(ErrorCode::UnmatchedLabel, "no mesh for label " + std::to_string(rec.label));
    }
    const TriangleMesh& mesh = meshes[it->second];
    if (mesh.label != rec.label || static_cast<std::size_t>(rec.face_index) >= mesh.faces.size()) {
        fail(ErrorCode::UnmatchedLabel, "mesh list does not match the binding for label " + std::to_string(rec.label));
    }
    return mesh;
}

bool is_exact_identity(const Pose& p) {
    return p.rotation == Mat3::Identity() && p.translation == Vec3::Zero();
}

} // namespace

Vec3 bound_anchor(std::span<const TriangleMesh> meshes, const BindingMap& binding, int g_index) {
    const BindingRecord& rec = binding.record(g_index);
    return anchor_point(mesh_for(meshes, binding, rec), rec);
}

Reprojection reproject_gaussian(const Camera& camera, std::span<const TriangleMesh> meshes,
                                const BindingMap& binding, int g_index) {
    const BindingRecord& rec = binding.record(g_index);
    const Vec3 anchor = anchor_point(mesh_for(meshes, binding, rec), rec);
    return {project_point(camera, anchor), rec.face_index};
}

std::vector<GaussianPrimitive> apply_instance_transform(std::span<const GaussianPrimitive> gaussians, int label,
                                                        const Pose& motion) {
    std::vector<GaussianPrimitive> out(gaussians.begin(), gaussians.end());
    if (is_exact_identity(motion)) return out;
    parallel_for(out.size(), [&](std::size_t i) {
        GaussianPrimitive& g = out[i];
        if (g.label != label) return;
        g.center = motion.apply(g.center);
        g.covariance = transform_covariance(g.covariance, motion.rotation);
        g.sh_rotation = motion.rotation * g.sh_rotation;
    });
    return out;
}

std::vector<SurfelPrimitive> apply_instance_transform(std::span<const SurfelPrimitive> surfels, int label,
                                                      const Pose& motion) {
    std::vector<SurfelPrimitive> out(surfels.begin(), surfels.end());
    if (is_exact_identity(motion)) return out;
    for (SurfelPrimitive& s : out) {
        if (s.label != label) continue;
        s.center = motion.apply(s.center);
        s.tangent_u = motion.rotation * s.tangent_u;
        s.tangent_v = motion.rotation * s.tangent_v;
        s.sh_rotation = motion.rotation * s.sh_rotation;
    }
    return out;
}

std::vector<GaussianPrimitive> deform_bound_gaussians(std::span<const GaussianPrimitive> gaussians,
                                                      std::span<const TriangleMesh> posed_meshes,
                                                      const BindingMap& binding,
                                                      const std::map<int, Pose>& motions) {
    if (binding.records.size() != gaussians.size()) {
        fail(ErrorCode::InvalidArgument, "binding does not cover every Gaussian");
    }
    std::vector<GaussianPrimitive> out(gaussians.begin(), gaussians.end());
    parallel_for(out.size(), [&](std::size_t i) {
        GaussianPrimitive& g = out[i];
        const auto it = motions.find(g.label);
        if (it == motions.end()) return;
        const BindingRecord& rec = binding.records[i];
        g.center = anchor_point(mesh_for(posed_meshes, binding, rec), rec);
        g.covariance = transform_covariance(g.covariance, it->second.rotation);
        g.sh_rotation = it->second.rotation * g.sh_rotation;
    });
    return out;
}

} // namespace gmp
