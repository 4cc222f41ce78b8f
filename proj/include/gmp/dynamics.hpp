// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gmp/geometry.hpp"

#include <span>
#include <vector>

namespace gmp {

struct RigidState {
    Pose pose;
    Vec3 linear_velocity = Vec3::Zero();  // world frame, m/s
    Vec3 angular_velocity = Vec3::Zero(); // body frame, rad/s
    double mass = 1.0;
    Mat3 inertia = Mat3::Identity(); // body frame, kg m^2
    int label = 0;
    // Body-frame points tested against the ground plane. Empty means the
    // body origin is the only contact point.
    std::vector<Vec3> contact_points;

    void validate() const;
};

struct Wrench {
    Vec3 force = Vec3::Zero();  // world frame
    Vec3 torque = Vec3::Zero(); // body frame
};

/// Penalty ground plane y = ground_height with Coulomb friction, plus global
/// gravity and linear drag. Friction never exceeds the force that stops a
/// contact point's slip within one step, so slow contacts stick.
struct ContactParams {
    double ground_height = 0.0;
    double stiffness = 1e5;        // N/m per contact point
    double damping_contact = 300.0; // N s/m per contact point
    double friction_mu = 0.5;
    double linear_damping = 0.0; // 1/s
    Vec3 gravity = Vec3(0.0, -9.81, 0.0);
    bool ground_enabled = true;

    void validate() const;
};

/// Constant wrench on one instance over [t_start, t_end).
struct WrenchPulse {
    int label = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    Wrench wrench;
};

using WrenchSchedule = std::vector<WrenchPulse>;

Wrench wrench_at(const WrenchSchedule& schedule, int label, double t);

struct Acceleration {
    Vec3 linear;  // v_dot
    Vec3 angular; // omega_dot, body frame
};

/// v_dot = f / m; omega_dot = I^-1 (tau - omega x I omega).
/// Throws SingularInertia when I is not SPD or its condition number exceeds 1e12.
Acceleration newton_euler_accel(const RigidState& state, const Wrench& wrench);

/// Ground contact wrench on the body (force world frame, torque body frame).
Wrench contact_wrench(const RigidState& state, const ContactParams& contact, double dt);

/// Semi-implicit Euler: velocities first, then the pose from the new
/// velocities. Rotation advances by exp(omega dt) and is re-orthonormalized.
RigidState step_semi_implicit(const RigidState& state, const Wrench& wrench, const ContactParams& contact, double dt);

struct TimedPose {
    double t = 0.0;
    Pose pose;
};

struct InstanceTrack {
    int label = 0;
    std::vector<TimedPose> samples;
};

struct SimulationResult {
    std::vector<InstanceTrack> tracks; // one per initial state, same order
    std::vector<RigidState> final_states;
};

/// Advances every body n_steps times; samples at t = k dt for k = 0..n_steps.
SimulationResult simulate(std::span<const RigidState> initial, const WrenchSchedule& schedule,
                          const ContactParams& contact, double dt, int n_steps);

double rotational_energy(const RigidState& state);

} // namespace gmp
