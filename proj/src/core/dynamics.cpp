// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/dynamics.hpp"

#include "gmp/error.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <string>

namespace gmp {

namespace {

constexpr double kMaxInertiaCondition = 1e12;

void check_inertia(const Mat3& I) {
    if (!I.allFinite() || (I - I.transpose()).cwiseAbs().maxCoeff() > kGeometryTol) {
        fail(ErrorCode::SingularInertia, "inertia is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(I, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxInertiaCondition) {
        fail(ErrorCode::SingularInertia, "inertia eigenvalues " + std::to_string(lo) + ".." + std::to_string(hi));
    }
}

} // namespace

void RigidState::validate() const {
    if (!(mass > 0.0) || !std::isfinite(mass)) fail(ErrorCode::InvalidArgument, "body mass must be positive");
    if (!is_rotation(pose.rotation)) fail(ErrorCode::InvalidArgument, "body pose rotation is not orthonormal");
    check_inertia(inertia);
}

void ContactParams::validate() const {
    if (!(stiffness > 0.0)) fail(ErrorCode::InvalidArgument, "contact stiffness must be positive");
    if (!(damping_contact >= 0.0)) fail(ErrorCode::InvalidArgument, "contact damping must be non-negative");
    if (!(friction_mu >= 0.0)) fail(ErrorCode::InvalidArgument, "friction coefficient must be non-negative");
    if (!(linear_damping >= 0.0)) fail(ErrorCode::InvalidArgument, "linear damping must be non-negative");
    if (!gravity.allFinite()) fail(ErrorCode::InvalidArgument, "gravity must be finite");
}

Wrench wrench_at(const WrenchSchedule& schedule, int label, double t) {
    Wrench total;
    for (const auto& pulse : schedule) {
        if (pulse.label == label && t >= pulse.t_start && t < pulse.t_end) {
            total.force += pulse.wrench.force;
            total.torque += pulse.wrench.torque;
        }
    }
    return total;
}

Acceleration newton_euler_accel(const RigidState& state, const Wrench& wrench) {
    check_inertia(state.inertia);
    const Vec3& w = state.angular_velocity;
    const Vec3 gyro = w.cross(state.inertia * w);
    return {wrench.force / state.mass, state.inertia.llt().solve(wrench.torque - gyro)};
}

Wrench contact_wrench(const RigidState& state, const ContactParams& contact, double dt) {
    Wrench out;
    if (!contact.ground_enabled) return out;
    static const std::vector<Vec3> kOrigin{Vec3::Zero()};
    const auto& points = state.contact_points.empty() ? kOrigin : state.contact_points;
    const Mat3& R = state.pose.rotation;

    struct Touch {
        Vec3 arm;      // world-frame lever arm
        Vec3 velocity; // world-frame point velocity
        double penetration;
    };
    std::vector<Touch> touching;
    for (const Vec3& c : points) {
        const Vec3 arm = R * c;
        const Vec3 p = state.pose.translation + arm;
        const double penetration = contact.ground_height - p.y();
        if (penetration <= 0.0) continue;
        const Vec3 vel = state.linear_velocity + R * state.angular_velocity.cross(c);
        touching.push_back({arm, vel, penetration});
    }
    if (touching.empty()) return out;

    // Mass felt at a contact point along `dir`; gains are capped so the explicit step stays stable.
    const Mat3 inertia_world = R * state.inertia * R.transpose();
    const auto inertia_llt = inertia_world.llt();
    const double n = static_cast<double>(touching.size());
    auto effective_mass = [&](const Vec3& arm, const Vec3& dir) {
        const Vec3 rn = arm.cross(dir);
        return 1.0 / (1.0 / state.mass + rn.dot(inertia_llt.solve(rn)));
    };

    Vec3 torque_world = Vec3::Zero();
    for (const Touch& t : touching) {
        const double m_normal = effective_mass(t.arm, Vec3::UnitY()) / n;
        const double k = std::min(contact.stiffness, m_normal / (dt * dt));
        const double c = std::min(contact.damping_contact, m_normal / dt);
        const double vn = t.velocity.y();
        const double normal = std::max(0.0, k * t.penetration - c * vn);
        Vec3 vt = t.velocity;
        vt.y() = 0.0;
        const double speed = vt.norm();
        const double limit = contact.friction_mu * normal;
        // mu N, capped by the force that cancels this point's slip in one step.
        Vec3 friction = Vec3::Zero();
        if (speed > 0.0) {
            const Vec3 dir = vt / speed;
            const double stopping = effective_mass(t.arm, dir) * speed / (dt * n);
            friction = -std::min(limit, stopping) * dir;
        }
        const Vec3 force = Vec3(0.0, normal, 0.0) + friction;
        out.force += force;
        torque_world += t.arm.cross(force);
    }
    out.torque = R.transpose() * torque_world;
    return out;
}

RigidState step_semi_implicit(const RigidState& state, const Wrench& wrench, const ContactParams& contact, double dt) {
    if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "time step must be positive");
    const Wrench touch = contact_wrench(state, contact, dt);
    Wrench total{wrench.force + touch.force, wrench.torque + touch.torque};
    if (contact.linear_damping > 0.0) total.force -= contact.linear_damping * state.mass * state.linear_velocity;

    const Acceleration acc = newton_euler_accel(state, total);
    RigidState next = state;
    next.linear_velocity = state.linear_velocity + dt * (acc.linear + contact.gravity);
    next.angular_velocity = state.angular_velocity + dt * acc.angular;
    next.pose.translation = state.pose.translation + dt * next.linear_velocity;
    const Vec3 rotvec = dt * next.angular_velocity;
    if (rotvec != Vec3::Zero()) next.pose.rotation = orthonormalize(state.pose.rotation * exp_so3(rotvec));
    return next;
}

SimulationResult simulate(std::span<const RigidState> initial, const WrenchSchedule& schedule,
                          const ContactParams& contact, double dt, int n_steps) {
    if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "time step must be positive");
    if (n_steps < 1) fail(ErrorCode::InvalidArgument, "simulation needs at least one step");
    contact.validate();

    SimulationResult result;
    result.final_states.assign(initial.begin(), initial.end());
    for (const auto& s : result.final_states) {
        s.validate();
        InstanceTrack track{s.label, {}};
        track.samples.reserve(static_cast<std::size_t>(n_steps) + 1);
        track.samples.push_back({0.0, s.pose});
        result.tracks.push_back(std::move(track));
    }
    for (int k = 0; k < n_steps; ++k) {
        const double t = k * dt;
        for (std::size_t b = 0; b < result.final_states.size(); ++b) {
            RigidState& s = result.final_states[b];
            s = step_semi_implicit(s, wrench_at(schedule, s.label, t), contact, dt);
            result.tracks[b].samples.push_back({(k + 1) * dt, s.pose});
        }
    }
    return result;
}

double rotational_energy(const RigidState& state) {
    return 0.5 * state.angular_velocity.dot(state.inertia * state.angular_velocity);
}

} // namespace gmp
