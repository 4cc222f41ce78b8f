// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the unit and acceptance tests: random generators,
// independent reference implementations and scene builders.

#pragma once

#include "gmp/dynamics.hpp"
#include "gmp/geometry.hpp"
#include "gmp/kinematics.hpp"
#include "gmp/mesh.hpp"
#include "gmp/renderer.hpp"
#include "gmp/scene.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace gmp::testing {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
Vec3 random_vec3(Rng& rng, double lo, double hi);
Mat3 random_rotation(Rng& rng);
Pose random_pose(Rng& rng, double translation_range);
/// R diag(e) R^T with eigenvalues in [lo, hi].
Mat3 random_spd(Rng& rng, double lo, double hi);
ShCoeffs random_sh(Rng& rng, int degree);
MDHChain random_chain(Rng& rng, int n_links);

/// Camera at `eye` looking at `target` with image y pointing along -up.
Camera look_at_camera(const Vec3& eye, const Vec3& target, const Vec3& up, double focal, int width, int height);

/// Gaussians placed inside the view frustum of `camera` at depths [2, 6].
std::vector<GaussianPrimitive> random_gaussians_in_view(Rng& rng, const Camera& camera, int count, int sh_degree);

/// O(pixels x Gaussians) renderer written from the formulas, without tiles.
RenderOutput reference_render(std::span<const GaussianPrimitive> gaussians, const Camera& camera,
                              const RenderConfig& config);

/// Link poses from the four elementary factors Rx(alpha) Tx(a) Rz(theta) Tz(d).
std::vector<Mat4> naive_forward_kinematics(const MDHChain& chain, std::span<const double> q);

TriangleMesh box_mesh(const Vec3& center, const Vec3& half_extent, int label);
/// Icosphere-like UV sphere.
TriangleMesh sphere_mesh(const Vec3& center, double radius, int label, int rings = 8, int segments = 12);
TriangleMesh merge_meshes(const TriangleMesh& a, const TriangleMesh& b);

/// Gaussians sampled on a mesh surface with isotropic covariance sigma^2.
std::vector<GaussianPrimitive> gaussians_on_mesh(const TriangleMesh& mesh, int count, double sigma, const Vec3& rgb,
                                                 int sh_degree, std::uint64_t seed);

/// Six revolute links (labels 1..6), link 6 a small end effector, camera
/// at 256 x 256 looking at the arm. Geometry is at q = 0.
SceneAsset six_link_arm_scene();
/// Arm plus a box (label 7) pushed along +x and a resting block (label 8).
SceneAsset push_box_scene();
/// Labels not owned by a chain link.
std::vector<int> object_labels(const SceneAsset& asset);

/// Box body on the ground sliding at v0 along +x.
RigidState sliding_box(double v0, int label = 1);

struct TempDir {
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    std::filesystem::path path;
};

std::string read_file(const std::filesystem::path& path);
std::filesystem::path fixture_dir();

} // namespace gmp::testing
