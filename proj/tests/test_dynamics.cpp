// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/dynamics.hpp"

#include "expect_error.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace gmp;
namespace gt = gmp::testing;

namespace {

ContactParams free_space() {
    ContactParams c;
    c.ground_enabled = false;
    c.gravity = Vec3::Zero();
    return c;
}

RigidState tumbling_body() {
    RigidState s;
    s.inertia = Vec3(1.0, 2.0, 3.0).asDiagonal();
    s.angular_velocity = Vec3(1.0, 1.0, 1.0);
    return s;
}

} // namespace

TEST(NewtonEuler, EquilibriumHasNoAcceleration) {
    const Acceleration a = newton_euler_accel(RigidState{}, Wrench{});
    EXPECT_EQ(a.linear, Vec3::Zero());
    EXPECT_EQ(a.angular, Vec3::Zero());
}

TEST(NewtonEuler, ForceOverMass) {
    RigidState s;
    s.mass = 2.0;
    const Acceleration a = newton_euler_accel(s, {Vec3(0.0, 0.0, -19.62), Vec3::Zero()});
    EXPECT_LT((a.linear - Vec3(0.0, 0.0, -9.81)).norm(), 1e-15);
    EXPECT_EQ(a.angular, Vec3::Zero());
}

TEST(NewtonEuler, GyroscopicTerm) {
    // w x Iw = (1,1,1) x (1,2,3) = (1,-2,1); -I^-1 of that is (-1, 1, -1/3).
    const Acceleration a = newton_euler_accel(tumbling_body(), Wrench{});
    EXPECT_LT((a.angular - Vec3(-1.0, 1.0, -1.0 / 3.0)).norm(), 1e-12);
}

TEST(NewtonEuler, IllConditionedInertiaRejected) {
    RigidState s;
    s.inertia = Vec3(1.0, 1.0, 1e-13).asDiagonal();
    gt::expect_error(ErrorCode::SingularInertia, [&] { newton_euler_accel(s, Wrench{}); });
}

TEST(Step, FreeDrift) {
    RigidState s;
    s.linear_velocity = Vec3(1.0, 0.0, 0.0);
    const RigidState next = step_semi_implicit(s, Wrench{}, free_space(), 0.1);
    EXPECT_LT((next.pose.translation - Vec3(0.1, 0.0, 0.0)).norm(), 1e-15);
    EXPECT_EQ(next.linear_velocity, s.linear_velocity);
}

TEST(Step, GravitySemiImplicitSum) {
    ContactParams c = free_space();
    c.gravity = Vec3(0.0, -9.81, 0.0);
    RigidState s;
    for (int k = 0; k < 10; ++k) s = step_semi_implicit(s, Wrench{}, c, 0.1);
    EXPECT_NEAR(s.linear_velocity.y(), -9.81, 1e-12);
    double drop = 0.0;
    for (int k = 1; k <= 10; ++k) drop -= 9.81 * k * 0.01;
    EXPECT_NEAR(s.pose.translation.y(), drop, 1e-12);
    EXPECT_NEAR(drop, -5.3955, 1e-12);
}

TEST(Step, RejectsNonPositiveStep) {
    gt::expect_error(ErrorCode::InvalidArgument, [] { step_semi_implicit(RigidState{}, Wrench{}, ContactParams{}, 0.0); });
}

TEST(Step, RotationStaysOrthonormal) {
    RigidState s = tumbling_body();
    for (int k = 0; k < 1000; ++k) {
        s = step_semi_implicit(s, Wrench{}, free_space(), 1e-3);
        ASSERT_LT((s.pose.rotation.transpose() * s.pose.rotation - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Simulate, TorqueFreeTumblingKeepsEnergy) {
    const RigidState s = tumbling_body();
    EXPECT_DOUBLE_EQ(rotational_energy(s), 3.0);
    const std::vector<RigidState> init{s};
    const auto r = simulate(init, {}, free_space(), 1e-4, 10000);
    EXPECT_NEAR(rotational_energy(r.final_states[0]), 3.0, 0.03);
}

TEST(Simulate, StaticsWithoutForces) {
    RigidState s;
    s.pose = Pose{rot_z(0.3), Vec3(1.0, 2.0, 3.0)};
    const std::vector<RigidState> init{s};
    const auto r = simulate(init, {}, free_space(), 1e-3, 100);
    ASSERT_EQ(r.tracks[0].samples.size(), 101u);
    for (const auto& p : r.tracks[0].samples) {
        EXPECT_EQ(p.pose.translation, s.pose.translation);
        EXPECT_EQ(p.pose.rotation, s.pose.rotation);
    }
}

TEST(Simulate, MomentumExactlyConstant) {
    RigidState s;
    s.mass = 3.0;
    s.linear_velocity = Vec3(0.3, -1.7, 2.2);
    s.angular_velocity = Vec3(0.5, -0.2, 0.1);
    const Vec3 p0 = s.mass * s.linear_velocity;
    for (int k = 0; k < 1000; ++k) {
        s = step_semi_implicit(s, Wrench{}, free_space(), 1e-3);
        ASSERT_EQ(s.mass * s.linear_velocity, p0);
    }
}

TEST(Simulate, CoulombSlideStopTime) {
    ContactParams c;
    c.friction_mu = 0.3;
    RigidState s = gt::sliding_box(1.0);
    const double dt = 1e-4;
    double stop = -1.0;
    for (int k = 1; k <= 10000 && stop < 0.0; ++k) {
        s = step_semi_implicit(s, Wrench{}, c, dt);
        if (s.linear_velocity.x() <= 1e-4) stop = k * dt;
    }
    const double expected = 1.0 / (0.3 * 9.81);
    EXPECT_NEAR(stop, expected, 0.05 * expected);
    for (int k = 0; k < 2000; ++k) s = step_semi_implicit(s, Wrench{}, c, dt);
    EXPECT_LT(std::abs(s.linear_velocity.x()), 1e-6);
}

TEST(Simulate, RestingBoxPenetrationEquilibrium) {
    ContactParams c;
    RigidState s;
    s.mass = 2.0;
    const double dt = 1e-4;
    for (int k = 0; k < 20000; ++k) {
        s = step_semi_implicit(s, Wrench{}, c, dt);
        if (k > 5000) {
            ASSERT_LE(-s.pose.translation.y(), s.mass * 9.81 / c.stiffness + 1e-6);
        }
    }
    EXPECT_NEAR(-s.pose.translation.y(), s.mass * 9.81 / c.stiffness, 1e-7);
}

// Light box on four corners at dt = 1e-3: the nominal gains would diverge explicitly.
TEST(Simulate, PushedCornerBoxStaysUpright) {
    const double h = 0.05, m = 0.5, mu = 0.3, force = 3.0, t_push = 0.3;
    RigidState s;
    s.mass = m;
    s.inertia = (m * 4.0 * h * h / 6.0) * Mat3::Identity();
    s.pose.translation = Vec3(0.0, h, 0.0);
    for (int i = 0; i < 4; ++i) s.contact_points.emplace_back((i & 1) ? h : -h, -h, (i & 2) ? h : -h);
    ContactParams c;
    c.friction_mu = mu;
    const WrenchSchedule push{{0, 0.0, t_push, {Vec3(force, 0.0, 0.0), Vec3::Zero()}}};
    s.label = 0;
    const auto r = simulate(std::span<const RigidState>(&s, 1), push, c, 1e-3, 1000);
    for (const auto& sample : r.tracks[0].samples) {
        ASSERT_LT((sample.pose.rotation - Mat3::Identity()).norm(), 1e-2) << "t=" << sample.t;
        ASSERT_NEAR(sample.pose.translation.y(), h, 1e-3) << "t=" << sample.t;
    }
    // Constant-acceleration push, then Coulomb deceleration.
    const double g = 9.81, a = force / m - mu * g, v = a * t_push;
    const double expected = 0.5 * a * t_push * t_push + v * v / (2.0 * mu * g);
    EXPECT_NEAR(r.final_states[0].pose.translation.x(), expected, 0.03 * expected);
    EXPECT_LT(r.final_states[0].linear_velocity.norm(), 1e-3);
}

TEST(Simulate, WrenchScheduleAppliesOnlyInWindow) {
    const WrenchSchedule sched{{1, 0.0, 0.5, {Vec3(2.0, 0.0, 0.0), Vec3::Zero()}}};
    EXPECT_EQ(wrench_at(sched, 1, 0.25).force, Vec3(2.0, 0.0, 0.0));
    EXPECT_EQ(wrench_at(sched, 1, 0.5).force, Vec3::Zero());
    EXPECT_EQ(wrench_at(sched, 2, 0.25).force, Vec3::Zero());
    RigidState s;
    s.label = 1;
    const std::vector<RigidState> init{s};
    const auto r = simulate(init, sched, free_space(), 0.01, 100);
    EXPECT_NEAR(r.final_states[0].linear_velocity.x(), 1.0, 1e-12);
}

TEST(Simulate, Deterministic) {
    const std::vector<RigidState> init{gt::sliding_box(1.0, 1), tumbling_body()};
    const auto a = simulate(init, {}, ContactParams{}, 1e-3, 500);
    const auto b = simulate(init, {}, ContactParams{}, 1e-3, 500);
    for (std::size_t i = 0; i < a.tracks.size(); ++i) {
        for (std::size_t k = 0; k < a.tracks[i].samples.size(); ++k) {
            ASSERT_EQ(a.tracks[i].samples[k].pose.matrix(), b.tracks[i].samples[k].pose.matrix());
        }
    }
}

TEST(RigidState, ValidateRejectsBadMass) {
    RigidState s;
    s.mass = 0.0;
    gt::expect_error(ErrorCode::InvalidArgument, [&] { s.validate(); });
}
