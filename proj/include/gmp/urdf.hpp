// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gmp/geometry.hpp"
#include "gmp/scene.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gmp {

/// Origin kept as the literal xyz/rpy numbers so re-emission is stable.
struct UrdfOrigin {
    Vec3 xyz = Vec3::Zero();
    Vec3 rpy = Vec3::Zero(); // R = Rz(yaw) Ry(pitch) Rx(roll)

    Pose pose() const;
    static UrdfOrigin from_pose(const Pose& pose);
};

Vec3 rotation_to_rpy(const Mat3& R);
Mat3 rpy_to_rotation(const Vec3& rpy);

struct UrdfInertial {
    UrdfOrigin origin;
    double mass = 1.0;
    std::array<double, 6> inertia{1.0, 0.0, 0.0, 1.0, 0.0, 1.0}; // ixx ixy ixz iyy iyz izz

    Mat3 inertia_matrix() const;
};

struct UrdfLink {
    std::string name;
    std::optional<UrdfInertial> inertial;
    std::string visual_mesh;
    std::string collision_mesh;
};

struct UrdfLimit {
    double lower = 0.0;
    double upper = 0.0;
    double effort = 0.0;
    double velocity = 0.0;
};

struct UrdfJoint {
    std::string name;
    std::string type = "revolute";
    std::string parent;
    std::string child;
    UrdfOrigin origin;
    Vec3 axis = Vec3::UnitX();
    std::optional<UrdfLimit> limit;
    double damping = 0.0;
    double friction = 0.0;
};

struct UrdfModel {
    std::string name = "robot";
    std::vector<UrdfLink> links;
    std::vector<UrdfJoint> joints;

    const UrdfLink* link(const std::string& name) const;
    /// The single link that is nobody's child.
    std::string root_link() const;
    std::size_t count_joints(const std::string& type) const;
};

/// Tree check: known endpoints, one parent per link, no cycles, one root,
/// positive masses. Throws CyclicJointGraph or ParseError.
void validate(const UrdfModel& model);

std::string write_urdf(const UrdfModel& model);
UrdfModel parse_urdf_string(const std::string& xml, const std::string& source = "<string>");
UrdfModel parse_urdf(const std::filesystem::path& path);

inline constexpr double kDefaultJointLimit = 2.0 * M_PI; // rad
inline constexpr double kDefaultJointEffort = 1000.0;    // N m
inline constexpr double kDefaultJointVelocity = 10.0;    // rad/s

/// URDF for the scene's chain: base_link plus one link per MDH link, joint
/// origins from the zero-angle link transforms (base pose folded into the
/// first), meshes referenced in link frames. Does not touch the disk.
UrdfModel urdf_from_scene(const SceneAsset& asset, const std::string& mesh_dir = "meshes");

/// Writes robot.urdf and meshes/<link>.obj under out_dir. Throws NoChain or
/// MissingMesh.
UrdfModel emit_urdf(const SceneAsset& asset, const std::filesystem::path& out_dir);

} // namespace gmp
