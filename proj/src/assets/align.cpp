// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/error.hpp"
#include "gmp/scene.hpp"

#include <cmath>

namespace gmp {

namespace {

bool exact_identity(const Pose& p) { return p.rotation == Mat3::Identity() && p.translation == Vec3::Zero(); }

} // namespace

SceneAsset transform_scene(const SceneAsset& asset, const Pose& motion) {
    if (exact_identity(motion)) return asset;
    SceneAsset out = asset;
    const Mat3& R = motion.rotation;
    for (auto& m : out.meshes) m = transform_mesh(m, motion);
    for (auto& g : out.gaussians) {
        g.center = motion.apply(g.center);
        g.covariance = transform_covariance(g.covariance, R);
        g.sh_rotation = R * g.sh_rotation;
    }
    // Barycentric and face-frame offsets are invariant under rigid motion.
    if (out.chain) out.chain->base_pose = motion * out.chain->base_pose;
    for (auto& b : out.bodies) {
        b.pose = motion * b.pose;
        b.linear_velocity = R * b.linear_velocity;
    }
    out.contact.ground_height += motion.translation.y();
    for (auto& w : out.wrenches) w.wrench.force = R * w.wrench.force;
    out.camera = move_camera_with_world(asset.camera, motion);
    for (auto& track : out.pose_tracks) {
        for (auto& s : track.samples) s.pose = motion * s.pose;
    }
    return out;
}

SceneAsset scale_scene(const SceneAsset& asset, double s) {
    if (!(s > 0.0) || !std::isfinite(s)) fail(ErrorCode::NonPositiveLength, "scale factor must be positive and finite");
    if (s == 1.0) return asset;
    SceneAsset out = asset;
    for (auto& m : out.meshes) {
        for (auto& v : m.vertices) v *= s;
    }
    for (auto& g : out.gaussians) {
        g.center *= s;
        g.covariance *= s * s;
    }
    if (out.binding) {
        for (auto& r : out.binding->records) {
            r.normal_offset *= s;
            r.tangent_offset *= s;
        }
    }
    if (out.chain) {
        out.chain->base_pose.translation *= s;
        for (auto& l : out.chain->links) {
            l.a *= s;
            l.d *= s;
        }
    }
    for (auto& b : out.bodies) {
        b.pose.translation *= s;
        b.linear_velocity *= s;
        for (auto& p : b.contact_points) p *= s;
    }
    out.contact.ground_height *= s;
    out.camera.world_to_camera.translation *= s;
    for (auto& track : out.pose_tracks) {
        for (auto& smp : track.samples) smp.pose.translation *= s;
    }
    return out;
}

SceneAsset set_origin(const SceneAsset& asset, const Vec3& reference_point) {
    return transform_scene(asset, Pose::from_translation(-reference_point));
}

SceneAsset rescale_scene(const SceneAsset& asset, double measured_length, double asset_length) {
    if (!(measured_length > 0.0) || !(asset_length > 0.0) || !std::isfinite(measured_length) ||
        !std::isfinite(asset_length)) {
        fail(ErrorCode::NonPositiveLength, "reference lengths must be positive and finite");
    }
    return scale_scene(asset, measured_length / asset_length);
}

Mat3 alignment_rotation(const Vec3& up_hint, const Vec3& forward_hint) {
    const double nu = up_hint.norm();
    const double nf = forward_hint.norm();
    if (!(nu > 0.0) || !(nf > 0.0) || !std::isfinite(nu) || !std::isfinite(nf)) {
        fail(ErrorCode::DegenerateHints, "up and forward hints must be non-zero");
    }
    const Vec3 y = up_hint / nu;
    const Vec3 f = forward_hint / nf;
    const double angle = std::atan2(y.cross(f).norm(), y.dot(f));
    if (angle < 1e-6 || angle > M_PI - 1e-6) {
        fail(ErrorCode::DegenerateHints, "up and forward hints are parallel");
    }
    const Vec3 z = (f - f.dot(y) * y).normalized();
    Mat3 R;
    R.row(0) = y.cross(z);
    R.row(1) = y;
    R.row(2) = z;
    return R;
}

SceneAsset reorient_scene(const SceneAsset& asset, const Vec3& up_hint, const Vec3& forward_hint) {
    return transform_scene(asset, Pose::from_rotation(alignment_rotation(up_hint, forward_hint)));
}

} // namespace gmp
