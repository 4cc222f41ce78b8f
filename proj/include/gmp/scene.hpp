// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gmp/binding.hpp"
#include "gmp/dynamics.hpp"
#include "gmp/geometry.hpp"
#include "gmp/kinematics.hpp"
#include "gmp/mesh.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <optional>
#include <string>
#include <vector>

namespace gmp {

inline constexpr int kSceneSchemaVersion = 1;

/// Physics values used when neither a body nor an estimate supplies one.
struct PhysicsDefaults {
    double link_mass = 1.0;      // kg
    double joint_damping = 0.1;  // N m s / rad
    double joint_friction = 0.0; // N m
};

struct SceneAsset {
    std::string name = "scene";
    int sh_degree = kDefaultShDegree;
    std::vector<TriangleMesh> meshes;
    std::vector<GaussianPrimitive> gaussians;
    std::optional<BindingMap> binding;
    std::optional<MDHChain> chain;
    std::vector<RigidState> bodies;
    ContactParams contact;
    WrenchSchedule wrenches;
    PhysicsDefaults physics;
    Camera camera;
    std::optional<JointTrajectory> joint_trajectory;
    std::vector<InstanceTrack> pose_tracks;

    /// Distinct mesh labels, ascending.
    std::vector<int> labels() const;
    const TriangleMesh* mesh_for(int label) const;
    /// Cross-reference checks; throws ParseError naming the offending label.
    void validate() const;
};

/// Writes manifest.json, meshes/*.obj, gaussians.ply and optional
/// binding/trajectory files into `dir` (created if missing).
void save_scene(const SceneAsset& asset, const std::filesystem::path& dir);
SceneAsset load_scene(const std::filesystem::path& dir);

TriangleMesh read_obj(const std::filesystem::path& path, int label = 0);
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

/// Binary little-endian splat PLY (x y z, f_dc_*, f_rest_*, opacity logit,
/// log scale_*, rot_* quaternion wxyz, instance_id, sh_rot_* quaternion) plus
/// exact opacity_linear and cov_* columns.
std::vector<GaussianPrimitive> read_gaussian_ply(const std::filesystem::path& path);
void write_gaussian_ply(const std::filesystem::path& path, const std::vector<GaussianPrimitive>& gaussians, int sh_degree);

/// Contents of a line-delimited trajectory file. Each line is a JSON object
/// {"t": s, "q": [rad...]} and/or {"t": s, "poses": {"label": pose}}.
struct TrajectoryFile {
    JointTrajectory joints;
    std::vector<InstanceTrack> tracks;
};

TrajectoryFile read_trajectory_file(const std::filesystem::path& path);
void write_joint_trajectory(const std::filesystem::path& path, const JointTrajectory& trajectory);
void write_pose_tracks(const std::filesystem::path& path, const std::vector<InstanceTrack>& tracks);

/// Applies a rigid change of world frame to every spatial quantity.
SceneAsset transform_scene(const SceneAsset& asset, const Pose& motion);
/// Uniform scale about the origin of every length (covariances by s^2).
SceneAsset scale_scene(const SceneAsset& asset, double s);

SceneAsset set_origin(const SceneAsset& asset, const Vec3& reference_point);
SceneAsset rescale_scene(const SceneAsset& asset, double measured_length, double asset_length);
/// Rotation taking up_hint to +y and the part of forward_hint orthogonal to
/// it to +z. Throws DegenerateHints for zero or (anti)parallel hints.
Mat3 alignment_rotation(const Vec3& up_hint, const Vec3& forward_hint);
SceneAsset reorient_scene(const SceneAsset& asset, const Vec3& up_hint, const Vec3& forward_hint);

/// Moves meshes and Gaussians of every label in `motions`. Bound Gaussians
/// are re-anchored on the moved meshes; unbound ones move rigidly.
SceneAsset move_instances(const SceneAsset& asset, const std::map<int, Pose>& motions);
/// Chain links posed at q relative to q_rest (zeros when empty).
SceneAsset pose_scene(const SceneAsset& asset, std::span<const double> q, std::span<const double> q_rest = {});
/// Instances moved by pose_tracks from their first sample to time t
/// (linear position, geodesic rotation between samples).
SceneAsset scene_at_time(const SceneAsset& asset, double t);

} // namespace gmp
