// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/binding.hpp"

#include "expect_error.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <limits>

using namespace gmp;
namespace gt = gmp::testing;

namespace {

TriangleMesh single_triangle(int label = 1) {
    TriangleMesh m;
    m.vertices = {Vec3(0.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0), Vec3(0.0, 1.0, 0.0)};
    m.faces = {{0, 1, 2}};
    m.label = label;
    return m;
}

GaussianPrimitive gaussian_at(const Vec3& c, int label) {
    GaussianPrimitive g;
    g.center = c;
    g.covariance = 1e-4 * Mat3::Identity();
    g.label = label;
    return g;
}

double segment_distance_sq(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (p - (a + t * ab)).squaredNorm();
}

// Plane projection if it lands inside, otherwise the nearest edge.
double triangle_distance_sq(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 n = (b - a).cross(c - a).normalized();
    const Vec3 q = p - (p - a).dot(n) * n;
    const bool inside = (b - a).cross(q - a).dot(n) >= 0.0 && (c - b).cross(q - b).dot(n) >= 0.0 &&
                        (a - c).cross(q - c).dot(n) >= 0.0;
    if (inside) return (p - q).squaredNorm();
    return std::min({segment_distance_sq(p, a, b), segment_distance_sq(p, b, c), segment_distance_sq(p, c, a)});
}

Camera front_camera() {
    return gt::look_at_camera(Vec3(0.0, 0.0, 3.0), Vec3::Zero(), Vec3::UnitY(), 200.0, 256, 256);
}

} // namespace

TEST(BuildBinding, CenterOnVertex) {
    const std::vector<TriangleMesh> meshes{single_triangle()};
    const std::vector<GaussianPrimitive> gs{gaussian_at(Vec3(1.0, 0.0, 0.0), 1)};
    const BindingMap b = build_binding(gs, meshes);
    ASSERT_EQ(b.records.size(), 1u);
    EXPECT_EQ(b.records[0].face_index, 0);
    EXPECT_LT((b.records[0].barycentric - Vec3(0.0, 1.0, 0.0)).norm(), 1e-12);
    EXPECT_EQ(b.records[0].normal_offset, 0.0);
}

TEST(BuildBinding, CenterAtCentroid) {
    const std::vector<TriangleMesh> meshes{single_triangle()};
    const std::vector<GaussianPrimitive> gs{gaussian_at(Vec3(1.0, 1.0, 0.0) / 3.0, 1)};
    const BindingMap b = build_binding(gs, meshes);
    EXPECT_LT((b.records[0].barycentric - Vec3::Constant(1.0 / 3.0)).norm(), 1e-12);
    EXPECT_NEAR(b.records[0].normal_offset, 0.0, 1e-15);
}

TEST(BuildBinding, OffsetAboveCentroid) {
    const TriangleMesh box = gt::box_mesh(Vec3::Zero(), Vec3(0.5, 0.5, 0.5), 1);
    const std::vector<TriangleMesh> meshes{box};
    std::vector<GaussianPrimitive> gs;
    for (std::size_t f = 0; f < box.faces.size(); ++f) {
        const Vec3 centroid = (box.corner(f, 0) + box.corner(f, 1) + box.corner(f, 2)) / 3.0;
        gs.push_back(gaussian_at(centroid + 0.05 * box.face_normal(f), 1));
    }
    const BindingMap b = build_binding(gs, meshes);
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const BindingRecord& r = b.records[i];
        EXPECT_NEAR(r.normal_offset, 0.05, 1e-9);
        const auto f = static_cast<std::size_t>(r.face_index);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < box.faces.size(); ++k) {
            best = std::min(best, triangle_distance_sq(gs[i].center, box.corner(k, 0), box.corner(k, 1), box.corner(k, 2)));
        }
        EXPECT_NEAR(triangle_distance_sq(gs[i].center, box.corner(f, 0), box.corner(f, 1), box.corner(f, 2)), best, 1e-12);
    }
}

TEST(BuildBinding, ClosestFaceMatchesBruteForce) {
    gt::Rng rng(11);
    const TriangleMesh sphere = gt::sphere_mesh(Vec3(0.1, -0.2, 0.3), 0.4, 2, 10, 14);
    const std::vector<TriangleMesh> meshes{sphere};
    std::vector<GaussianPrimitive> gs;
    for (int i = 0; i < 300; ++i) gs.push_back(gaussian_at(gt::random_vec3(rng, -0.6, 0.8), 2));
    const BindingMap b = build_binding(gs, meshes);
    ASSERT_EQ(b.records.size(), gs.size());
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const BindingRecord& r = b.records[i];
        EXPECT_EQ(r.gaussian_index, static_cast<int>(i));
        EXPECT_EQ(r.label, 2);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < sphere.faces.size(); ++k) {
            best = std::min(best, triangle_distance_sq(gs[i].center, sphere.corner(k, 0), sphere.corner(k, 1),
                                                       sphere.corner(k, 2)));
        }
        const auto f = static_cast<std::size_t>(r.face_index);
        EXPECT_NEAR(triangle_distance_sq(gs[i].center, sphere.corner(f, 0), sphere.corner(f, 1), sphere.corner(f, 2)),
                    best, 1e-12);
        EXPECT_GE(r.barycentric.minCoeff(), -1e-9);
        EXPECT_NEAR(r.barycentric.sum(), 1.0, 1e-9);
        EXPECT_LT((bound_anchor(meshes, b, static_cast<int>(i)) - gs[i].center).norm(), 1e-9);
    }
}

TEST(BuildBinding, BindsOnlyWithinLabel) {
    const std::vector<TriangleMesh> meshes{gt::box_mesh(Vec3::Zero(), Vec3::Constant(0.1), 1),
                                           gt::box_mesh(Vec3(1.0, 0.0, 0.0), Vec3::Constant(0.1), 2)};
    const std::vector<GaussianPrimitive> gs{gaussian_at(Vec3(0.95, 0.0, 0.0), 1), gaussian_at(Vec3::Zero(), 2)};
    const BindingMap b = build_binding(gs, meshes);
    EXPECT_EQ(b.mesh_of_label.at(1), 0u);
    EXPECT_EQ(b.mesh_of_label.at(2), 1u);
    for (int i = 0; i < 2; ++i) EXPECT_LT((bound_anchor(meshes, b, i) - gs[static_cast<std::size_t>(i)].center).norm(), 1e-9);
}

TEST(BuildBinding, Errors) {
    const std::vector<TriangleMesh> meshes{single_triangle(1)};
    const std::vector<GaussianPrimitive> stray{gaussian_at(Vec3::Zero(), 5)};
    const std::string msg = gt::expect_error(ErrorCode::UnmatchedLabel, [&] { build_binding(stray, meshes); });
    EXPECT_NE(msg.find('5'), std::string::npos);
    TriangleMesh empty;
    empty.label = 1;
    empty.vertices = {Vec3::Zero()};
    const std::vector<TriangleMesh> empties{empty};
    const std::vector<GaussianPrimitive> one{gaussian_at(Vec3::Zero(), 1)};
    gt::expect_error(ErrorCode::EmptyMesh, [&] { build_binding(one, empties); });
}

TEST(Reproject, OpticalAxisHitsPrincipalPoint) {
    TriangleMesh tri = single_triangle();
    for (Vec3& v : tri.vertices) v -= Vec3(1.0, 1.0, 0.0) / 3.0;
    const std::vector<TriangleMesh> meshes{tri};
    const std::vector<GaussianPrimitive> gs{gaussian_at(Vec3::Zero(), 1)};
    const BindingMap b = build_binding(gs, meshes);
    const Camera cam = front_camera();
    const Reprojection r = reproject_gaussian(cam, meshes, b, 0);
    EXPECT_NEAR(r.pixel.x(), cam.cx, 1e-12);
    EXPECT_NEAR(r.pixel.y(), cam.cy, 1e-12);
    EXPECT_EQ(r.face_index, 0);
}

TEST(Reproject, AgreesWithProjectedAnchor) {
    gt::Rng rng(23);
    const Camera cam = front_camera();
    for (int scene = 0; scene < 100; ++scene) {
        const TriangleMesh box = transform_mesh(gt::box_mesh(Vec3::Zero(), gt::random_vec3(rng, 0.1, 0.4), 3),
                                                Pose{gt::random_rotation(rng), gt::random_vec3(rng, -0.3, 0.3)});
        const std::vector<TriangleMesh> meshes{box};
        std::vector<GaussianPrimitive> gs;
        for (int i = 0; i < 5; ++i) gs.push_back(gaussian_at(gt::random_vec3(rng, -0.5, 0.5), 3));
        const BindingMap b = build_binding(gs, meshes);
        for (int i = 0; i < 5; ++i) {
            const Reprojection r = reproject_gaussian(cam, meshes, b, i);
            const Vec2 expected = project_point(cam, bound_anchor(meshes, b, i));
            ASSERT_LT((r.pixel - expected).norm(), 1e-9);
            ASSERT_EQ(r.face_index, b.records[static_cast<std::size_t>(i)].face_index);
        }
    }
}

TEST(Reproject, UnboundIndexRejected) {
    const std::vector<TriangleMesh> meshes{single_triangle()};
    const std::vector<GaussianPrimitive> gs{gaussian_at(Vec3::Zero(), 1)};
    const BindingMap b = build_binding(gs, meshes);
    gt::expect_error(ErrorCode::UnmatchedLabel, [&] { reproject_gaussian(front_camera(), meshes, b, 3); });
}

TEST(InstanceTransform, QuarterTurnPlusShift) {
    const std::vector<GaussianPrimitive> gs{gaussian_at(Vec3(1.0, 0.0, 0.0), 1)};
    const auto out = apply_instance_transform(gs, 1, Pose{rot_z(M_PI / 2.0), Vec3(1.0, 0.0, 0.0)});
    EXPECT_LT((out[0].center - Vec3(1.0, 1.0, 0.0)).norm(), 1e-15);
}

TEST(InstanceTransform, IdentityIsBitIdentical) {
    gt::Rng rng(3);
    const auto gs = gt::random_gaussians_in_view(rng, front_camera(), 50, 2);
    for (int label = 0; label < 4; ++label) {
        const auto out = apply_instance_transform(gs, label, Pose::identity());
        for (std::size_t i = 0; i < gs.size(); ++i) {
            ASSERT_EQ(out[i].center, gs[i].center);
            ASSERT_EQ(out[i].covariance, gs[i].covariance);
            ASSERT_EQ(out[i].sh_rotation, gs[i].sh_rotation);
        }
    }
}

TEST(InstanceTransform, OtherLabelsUntouchedAndEigenvaluesKept) {
    gt::Rng rng(4);
    const auto gs = gt::random_gaussians_in_view(rng, front_camera(), 80, 1);
    const Pose p = gt::random_pose(rng, 1.0);
    const auto out = apply_instance_transform(gs, 2, p);
    for (std::size_t i = 0; i < gs.size(); ++i) {
        if (gs[i].label != 2) {
            EXPECT_EQ(out[i].center, gs[i].center);
            continue;
        }
        EXPECT_LT((out[i].center - p.apply(gs[i].center)).norm(), 1e-12);
        const Vec3 before = Eigen::SelfAdjointEigenSolver<Mat3>(gs[i].covariance).eigenvalues();
        const Vec3 after = Eigen::SelfAdjointEigenSolver<Mat3>(out[i].covariance).eigenvalues();
        EXPECT_LT((before - after).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_EQ(out[i].sh, gs[i].sh);
    }
}

TEST(InstanceTransform, ForwardThenInverseRestoresCenters) {
    gt::Rng rng(5);
    const auto gs = gt::random_gaussians_in_view(rng, front_camera(), 100, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const Pose p = gt::random_pose(rng, 2.0);
        const auto back = apply_instance_transform(apply_instance_transform(gs, 1, p), 1, p.inverse());
        for (std::size_t i = 0; i < gs.size(); ++i) ASSERT_LT((back[i].center - gs[i].center).norm(), 1e-9);
    }
}

TEST(InstanceTransform, SurfelTangentsRotate) {
    SurfelPrimitive s;
    s.label = 1;
    s.center = Vec3(1.0, 0.0, 0.0);
    const std::vector<SurfelPrimitive> ss{s};
    const auto out = apply_instance_transform(ss, 1, Pose{rot_z(M_PI / 2.0), Vec3::Zero()});
    EXPECT_LT((out[0].tangent_u - Vec3::UnitY()).norm(), 1e-15);
    EXPECT_LT((out[0].tangent_v + Vec3::UnitX()).norm(), 1e-15);
    EXPECT_LT((out[0].center - Vec3::UnitY()).norm(), 1e-15);
}

TEST(Rigidity, AnchorsFollowCoMovedMesh) {
    gt::Rng rng(6);
    const TriangleMesh sphere = gt::sphere_mesh(Vec3::Zero(), 0.3, 1);
    const std::vector<TriangleMesh> meshes{sphere};
    const auto gs = gt::gaussians_on_mesh(sphere, 200, 0.01, Vec3(0.5, 0.5, 0.5), 1, 9);
    const BindingMap b = build_binding(gs, meshes);
    for (int trial = 0; trial < 20; ++trial) {
        const Pose p = gt::random_pose(rng, 1.5);
        const std::vector<TriangleMesh> moved{transform_mesh(sphere, p)};
        const auto moved_gs = apply_instance_transform(gs, 1, p);
        const BindingMap rebound = build_binding(moved_gs, moved);
        for (std::size_t i = 0; i < gs.size(); ++i) {
            const int gi = static_cast<int>(i);
            ASSERT_LT((bound_anchor(moved, b, gi) - p.apply(bound_anchor(meshes, b, gi))).norm(), 1e-9);
            ASSERT_LT((bound_anchor(moved, b, gi) - moved_gs[i].center).norm(), 1e-9);
            ASSERT_EQ(rebound.records[i].face_index, b.records[i].face_index);
            ASSERT_NEAR(rebound.records[i].normal_offset, b.records[i].normal_offset, 1e-9);
        }
    }
}

TEST(Rigidity, DeformFollowsMeshMotions) {
    gt::Rng rng(8);
    const std::vector<TriangleMesh> meshes{gt::box_mesh(Vec3::Zero(), Vec3::Constant(0.2), 1),
                                           gt::box_mesh(Vec3(1.0, 0.0, 0.0), Vec3::Constant(0.2), 2)};
    std::vector<GaussianPrimitive> gs = gt::gaussians_on_mesh(meshes[0], 40, 0.01, Vec3::Ones(), 0, 1);
    const auto second = gt::gaussians_on_mesh(meshes[1], 40, 0.01, Vec3::Ones(), 0, 2);
    gs.insert(gs.end(), second.begin(), second.end());
    const BindingMap b = build_binding(gs, meshes);
    const Pose p = gt::random_pose(rng, 1.0);
    const std::vector<TriangleMesh> posed{transform_mesh(meshes[0], p), meshes[1]};
    const auto out = deform_bound_gaussians(gs, posed, b, {{1, p}});
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const Vec3 expected = gs[i].label == 1 ? p.apply(gs[i].center) : gs[i].center;
        ASSERT_LT((out[i].center - expected).norm(), 1e-9);
    }
}
