// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/error.hpp"
#include "gmp/scene.hpp"

#include <algorithm>

namespace gmp {

SceneAsset move_instances(const SceneAsset& asset, const std::map<int, Pose>& motions) {
    SceneAsset out = asset;
    for (auto& m : out.meshes) {
        const auto it = motions.find(m.label);
        if (it != motions.end()) m = transform_mesh(m, it->second);
    }
    if (asset.binding) {
        out.gaussians = deform_bound_gaussians(asset.gaussians, out.meshes, *asset.binding, motions);
    } else {
        for (const auto& [label, motion] : motions) out.gaussians = apply_instance_transform(out.gaussians, label, motion);
    }
    return out;
}

SceneAsset pose_scene(const SceneAsset& asset, std::span<const double> q, std::span<const double> q_rest) {
    if (!asset.chain) fail(ErrorCode::NoChain, "scene has no kinematic chain");
    const std::vector<double> zeros(asset.chain->revolute_count(), 0.0);
    return move_instances(asset, link_motions(*asset.chain, q_rest.empty() ? std::span<const double>(zeros) : q_rest, q));
}

namespace {

Pose track_pose(const InstanceTrack& track, double t) {
    const auto& s = track.samples;
    if (t <= s.front().t) return s.front().pose;
    if (t >= s.back().t) return s.back().pose;
    const auto hi = std::upper_bound(s.begin(), s.end(), t, [](double v, const TimedPose& p) { return v < p.t; });
    const auto lo = hi - 1;
    const double u = (t - lo->t) / (hi->t - lo->t);
    if (u == 0.0) return lo->pose;
    Pose p;
    p.translation = (1.0 - u) * lo->pose.translation + u * hi->pose.translation;
    p.rotation = lo->pose.rotation * exp_so3(u * log_so3(lo->pose.rotation.transpose() * hi->pose.rotation));
    return p;
}

} // namespace

SceneAsset scene_at_time(const SceneAsset& asset, double t) {
    std::map<int, Pose> motions;
    for (const auto& track : asset.pose_tracks) {
        if (track.samples.empty()) continue;
        motions[track.label] = relative_link_motion(track.samples.front().pose, track_pose(track, t));
    }
    return move_instances(asset, motions);
}

} // namespace gmp
