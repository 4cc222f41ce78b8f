// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/kinematics.hpp"

#include "gmp/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <set>
#include <sstream>

namespace gmp {

std::size_t MDHChain::revolute_count() const {
    std::size_t n = 0;
    for (const auto& link : links) n += link.joint_type == JointType::Revolute ? 1 : 0;
    return n;
}

void MDHChain::validate() const {
    if (links.empty()) fail(ErrorCode::InvalidArgument, "MDH chain has no links");
    if (!is_rotation(base_pose.rotation)) fail(ErrorCode::InvalidArgument, "chain base pose is not rigid");
    std::set<int> labels;
    for (const auto& link : links) {
        if (!labels.insert(link.label).second) {
            fail(ErrorCode::InvalidArgument, "duplicate link label " + std::to_string(link.label));
        }
    }
}

void JointTrajectory::validate(std::size_t arity) const {
    if (timestamps.size() != joint_angles.size()) {
        fail(ErrorCode::InvalidArgument, "trajectory has mismatched timestamp and row counts");
    }
    for (std::size_t i = 0; i < timestamps.size(); ++i) {
        if (joint_angles[i].size() != arity) {
            std::ostringstream os;
            os << "trajectory row " << i << " has " << joint_angles[i].size() << " angles, expected " << arity;
            fail(ErrorCode::ArityMismatch, os.str());
        }
        if (i > 0 && !(timestamps[i] > timestamps[i - 1])) {
            fail(ErrorCode::InvalidArgument, "trajectory timestamps must be strictly increasing");
        }
    }
}

Mat4 link_transform(const MDHLink& link, double theta) {
    const double th = theta + link.theta_offset;
    const double ct = std::cos(th), st = std::sin(th);
    const double ca = std::cos(link.alpha), sa = std::sin(link.alpha);
    Mat4 T;
    T << ct, -st, 0.0, link.a,
         st * ca, ct * ca, -sa, -sa * link.d,
         st * sa, ct * sa, ca, ca * link.d,
         0.0, 0.0, 0.0, 1.0;
    return T;
}

std::vector<Pose> forward_kinematics(const MDHChain& chain, std::span<const double> q) {
    if (q.size() != chain.revolute_count()) {
        std::ostringstream os;
        os << "got " << q.size() << " joint values for " << chain.revolute_count() << " revolute links";
        fail(ErrorCode::ArityMismatch, os.str());
    }
    std::vector<Pose> poses;
    poses.reserve(chain.links.size());
    Pose current = chain.base_pose;
    std::size_t j = 0;
    for (const auto& link : chain.links) {
        const double theta = link.joint_type == JointType::Revolute ? q[j++] : 0.0;
        current = current * Pose::from_matrix(link_transform(link, theta));
        poses.push_back(current);
    }
    return poses;
}

Vec3 point_to_base(const Pose& link_pose_at_rest, const Vec3& p0) { return link_pose_at_rest.inverse().apply(p0); }

Vec3 point_at_time(const Pose& link_pose_at_t, const Vec3& p_base) { return link_pose_at_t.apply(p_base); }

Pose relative_link_motion(const Pose& rest, const Pose& current) { return current * rest.inverse(); }

std::map<int, Pose> link_motions(const MDHChain& chain, std::span<const double> q_rest, std::span<const double> q) {
    const auto rest = forward_kinematics(chain, q_rest);
    const auto now = forward_kinematics(chain, q);
    std::map<int, Pose> motions;
    for (std::size_t i = 0; i < chain.links.size(); ++i) {
        motions[chain.links[i].label] = relative_link_motion(rest[i], now[i]);
    }
    return motions;
}

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

Vec6 pose_error(const Pose& target, const Pose& current) {
    Vec6 e;
    e.head<3>() = target.translation - current.translation;
    e.tail<3>() = log_so3(target.rotation * current.rotation.transpose());
    return e;
}

} // namespace

std::vector<double> solve_ik(const MDHChain& chain, const Pose& target, std::span<const double> q_seed,
                             const IkOptions& options) {
    const std::size_t n = chain.revolute_count();
    if (n == 0) fail(ErrorCode::InvalidArgument, "IK needs at least one revolute joint");
    if (q_seed.size() != n) fail(ErrorCode::ArityMismatch, "IK seed arity does not match the chain");

    std::vector<double> q(q_seed.begin(), q_seed.end());
    const double lambda2 = options.damping * options.damping;
    for (int iter = 0; iter <= options.max_iterations; ++iter) {
        const Pose end = forward_kinematics(chain, q).back();
        const double pos_err = (target.translation - end.translation).norm();
        const double rot_err = rotation_distance(target.rotation, end.rotation);
        if (pos_err < options.tolerance && rot_err < options.tolerance) return q;
        if (iter == options.max_iterations) break;

        const Vec6 e = pose_error(target, end);
        Eigen::Matrix<double, 6, Eigen::Dynamic> J(6, static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<double> qh = q;
            qh[k] += options.jacobian_step;
            const Pose moved = forward_kinematics(chain, qh).back();
            J.col(static_cast<Eigen::Index>(k)) = pose_error(moved, end) / options.jacobian_step;
        }
        const Eigen::Matrix<double, 6, 6> A = J * J.transpose() + lambda2 * Eigen::Matrix<double, 6, 6>::Identity();
        Eigen::VectorXd dq = J.transpose() * A.ldlt().solve(e);
        const double step = dq.cwiseAbs().maxCoeff();
        if (step > options.max_step) dq *= options.max_step / step;
        for (std::size_t k = 0; k < n; ++k) q[k] += dq[static_cast<Eigen::Index>(k)];
    }
    std::ostringstream os;
    os << "no solution within " << options.max_iterations << " iterations";
    fail(ErrorCode::IKNoConvergence, os.str());
}

} // namespace gmp
