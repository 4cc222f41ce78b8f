// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/error.hpp"
#include "gmp/mesh_tools.hpp"
#include "gmp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace gmp {

std::vector<Vec3> sample_surface(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed) {
    if (mesh.faces.empty()) fail(ErrorCode::EmptyGeometry, "cannot sample a mesh without faces");
    std::vector<double> cumulative(mesh.faces.size());
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        total += mesh.face_area(f);
        cumulative[f] = total;
    }
    if (!(total > 0.0)) fail(ErrorCode::EmptyGeometry, "mesh has zero surface area");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<Vec3> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double r = uniform(rng) * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        const std::size_t f = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
        const double s = std::sqrt(uniform(rng));
        const double v = uniform(rng);
        out.push_back((1.0 - s) * mesh.corner(f, 0) + s * (1.0 - v) * mesh.corner(f, 1) + s * v * mesh.corner(f, 2));
    }
    return out;
}

KdTree::KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
    std::vector<std::uint32_t> idx(points_.size());
    std::iota(idx.begin(), idx.end(), 0u);
    nodes_.reserve(points_.size());
    root_ = build(idx, 0, idx.size(), 0);
}

std::int32_t KdTree::build(std::vector<std::uint32_t>& idx, std::size_t lo, std::size_t hi, int depth) {
    if (lo >= hi) return -1;
    const int axis = depth % 3;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(idx.begin() + static_cast<std::ptrdiff_t>(lo), idx.begin() + static_cast<std::ptrdiff_t>(mid),
                     idx.begin() + static_cast<std::ptrdiff_t>(hi),
                     [&](std::uint32_t a, std::uint32_t b) { return points_[a][axis] < points_[b][axis]; });
    const auto node = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({idx[mid], axis, -1, -1});
    const std::int32_t left = build(idx, lo, mid, depth + 1);
    const std::int32_t right = build(idx, mid + 1, hi, depth + 1);
    nodes_[static_cast<std::size_t>(node)].left = left;
    nodes_[static_cast<std::size_t>(node)].right = right;
    return node;
}

void KdTree::search(std::int32_t index, const Vec3& q, double& best) const {
    if (index < 0) return;
    const Node& n = nodes_[static_cast<std::size_t>(index)];
    const Vec3& p = points_[n.point];
    best = std::min(best, (p - q).squaredNorm());
    const double diff = q[n.axis] - p[n.axis];
    const std::int32_t near = diff < 0.0 ? n.left : n.right;
    const std::int32_t far = diff < 0.0 ? n.right : n.left;
    search(near, q, best);
    if (diff * diff < best) search(far, q, best);
}

double KdTree::nearest_squared(const Vec3& q) const {
    double best = std::numeric_limits<double>::infinity();
    search(root_, q, best);
    return best;
}

namespace {

std::vector<double> nearest_distances_squared(std::span<const Vec3> from, const KdTree& to) {
    std::vector<double> out(from.size());
    parallel_for(from.size(), [&](std::size_t i) { out[i] = to.nearest_squared(from[i]); });
    return out;
}

void require_non_empty(std::span<const Vec3> a, std::span<const Vec3> b) {
    if (a.empty() || b.empty()) fail(ErrorCode::EmptyGeometry, "metric inputs must be non-empty");
}

} // namespace

double cloud_mse(std::span<const Vec3> candidate, std::span<const Vec3> reference) {
    require_non_empty(candidate, reference);
    const auto d_cr = nearest_distances_squared(candidate, KdTree(reference));
    const auto d_rc = nearest_distances_squared(reference, KdTree(candidate));
    const double m_cr = std::accumulate(d_cr.begin(), d_cr.end(), 0.0) / static_cast<double>(d_cr.size());
    const double m_rc = std::accumulate(d_rc.begin(), d_rc.end(), 0.0) / static_cast<double>(d_rc.size());
    return 0.5 * (m_cr + m_rc);
}

FScore cloud_fscore(std::span<const Vec3> candidate, std::span<const Vec3> reference, double tau) {
    require_non_empty(candidate, reference);
    if (!(tau > 0.0)) fail(ErrorCode::InvalidArgument, "tau must be positive");
    const double tau2 = tau * tau;
    const auto fraction_within = [tau2](const std::vector<double>& d) {
        const auto n = std::count_if(d.begin(), d.end(), [tau2](double x) { return x < tau2; });
        return static_cast<double>(n) / static_cast<double>(d.size());
    };
    FScore s;
    s.precision = fraction_within(nearest_distances_squared(candidate, KdTree(reference)));
    s.recall = fraction_within(nearest_distances_squared(reference, KdTree(candidate)));
    const double sum = s.precision + s.recall;
    s.fscore = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
    return s;
}

double mesh_mse(const TriangleMesh& candidate, std::span<const Vec3> reference, std::size_t samples,
                std::uint64_t seed) {
    if (reference.empty()) fail(ErrorCode::EmptyGeometry, "reference point set is empty");
    return cloud_mse(sample_surface(candidate, samples, seed), reference);
}

double mesh_mse(const TriangleMesh& candidate, const TriangleMesh& reference, std::size_t samples,
                std::uint64_t seed) {
    return mesh_mse(candidate, sample_surface(reference, samples, seed), samples, seed);
}

double mesh_fscore(const TriangleMesh& candidate, std::span<const Vec3> reference, double tau, std::size_t samples,
                   std::uint64_t seed) {
    if (reference.empty()) fail(ErrorCode::EmptyGeometry, "reference point set is empty");
    return cloud_fscore(sample_surface(candidate, samples, seed), reference, tau).fscore;
}

double mesh_fscore(const TriangleMesh& candidate, const TriangleMesh& reference, double tau, std::size_t samples,
                   std::uint64_t seed) {
    return mesh_fscore(candidate, sample_surface(reference, samples, seed), tau, samples, seed);
}

} // namespace gmp
