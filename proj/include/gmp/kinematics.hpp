// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gmp/geometry.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace gmp {

enum class JointType { Revolute, Fixed };

/// One modified Denavit-Hartenberg link. The joint rotates about the link
/// frame's z axis; theta_offset is added to the joint variable.
struct MDHLink {
    double a = 0.0;
    double alpha = 0.0;
    double d = 0.0;
    double theta_offset = 0.0;
    JointType joint_type = JointType::Revolute;
    int label = 0;
    std::string name;
};

struct MDHChain {
    Pose base_pose;
    std::vector<MDHLink> links;

    std::size_t revolute_count() const;
    /// At least one link and distinct labels, else InvalidArgument.
    void validate() const;
};

struct JointTrajectory {
    std::vector<double> timestamps;
    std::vector<std::vector<double>> joint_angles;

    /// Strictly increasing stamps and rows of the given arity.
    void validate(std::size_t arity) const;
};

/// Link transform for joint angle theta (theta_offset added):
///   [ c      -s      0    a    ]
///   [ s ca    c ca  -sa  -sa d ]
///   [ s sa    c sa   ca   ca d ]
///   [ 0       0      0    1    ]
Mat4 link_transform(const MDHLink& link, double theta);

/// World pose of every link; q holds one angle per revolute link in order.
std::vector<Pose> forward_kinematics(const MDHChain& chain, std::span<const double> q);

Vec3 point_to_base(const Pose& link_pose_at_rest, const Vec3& p0);
Vec3 point_at_time(const Pose& link_pose_at_t, const Vec3& p_base);
/// T_t o T_0^-1: world-frame motion carrying a link from its rest pose.
Pose relative_link_motion(const Pose& rest, const Pose& current);

/// Relative motion of every link label between two configurations.
std::map<int, Pose> link_motions(const MDHChain& chain, std::span<const double> q_rest, std::span<const double> q);

struct IkOptions {
    double tolerance = 1e-6;
    int max_iterations = 200;
    double jacobian_step = 1e-6;
    double damping = 1e-3;
    double max_step = 0.5; // rad per iteration
};

/// Damped least squares on a forward-difference Jacobian. Converged when the
/// end-link position error (m) and geodesic orientation error (rad) are both
/// below tolerance; throws IKNoConvergence otherwise.
std::vector<double> solve_ik(const MDHChain& chain, const Pose& target, std::span<const double> q_seed,
                             const IkOptions& options = {});

} // namespace gmp
