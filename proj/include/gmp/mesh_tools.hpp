// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gmp/geometry.hpp"
#include "gmp/mesh.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gmp {

inline constexpr double kDefaultMinComponentFraction = 0.01;
inline constexpr int kDefaultVisibilitySamples = 64;
inline constexpr double kDefaultFscoreTau = 1e-5;            // meters
inline constexpr std::size_t kDefaultSurfaceSamples = 10000;
inline constexpr std::uint64_t kDefaultSamplingSeed = 20260101;

/// Drops small connected components and faces no exterior viewpoint sees
/// first. Repeats both filters until nothing changes, then compacts the
/// vertex array. Throws EmptyResult when every face is removed.
TriangleMesh clean_mesh(const TriangleMesh& mesh, double min_component_fraction = kDefaultMinComponentFraction,
                        int visibility_samples = kDefaultVisibilitySamples);

/// Face ids of connected components (vertices welded by exact position).
std::vector<int> face_components(const TriangleMesh& mesh);

/// Evenly spread unit directions (Fibonacci lattice).
std::vector<Vec3> sphere_directions(int count);

/// Flat bounding-volume hierarchy over the faces of one mesh.
class TriangleBvh {
public:
    explicit TriangleBvh(const TriangleMesh& mesh);

    struct Hit {
        double t = 0.0;
        std::size_t face = 0;
    };

    /// Closest hit of origin + t dir with t in (t_min, t_max).
    std::optional<Hit> intersect(const Vec3& origin, const Vec3& dir, double t_min, double t_max) const;

private:
    struct Node {
        Eigen::AlignedBox3d box;
        std::uint32_t first = 0;
        std::uint32_t count = 0; // leaf when > 0
        std::uint32_t right = 0; // left child is the next node
    };
    std::uint32_t build(std::uint32_t first, std::uint32_t count);

    const TriangleMesh& mesh_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

/// Möller-Trumbore; returns the ray parameter of the hit.
std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b, const Vec3& c);

/// Area-weighted uniform samples, deterministic for a given seed.
std::vector<Vec3> sample_surface(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed = kDefaultSamplingSeed);

class KdTree {
public:
    explicit KdTree(std::span<const Vec3> points);
    /// Squared distance to the nearest stored point.
    double nearest_squared(const Vec3& q) const;
    std::size_t size() const { return points_.size(); }

private:
    struct Node {
        std::uint32_t point = 0;
        int axis = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
    };
    std::int32_t build(std::vector<std::uint32_t>& idx, std::size_t lo, std::size_t hi, int depth);
    void search(std::int32_t node, const Vec3& q, double& best) const;

    std::vector<Vec3> points_;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

/// Symmetric mean of squared nearest-neighbor distances.
double cloud_mse(std::span<const Vec3> candidate, std::span<const Vec3> reference);

struct FScore {
    double precision = 0.0;
    double recall = 0.0;
    double fscore = 0.0;
};

FScore cloud_fscore(std::span<const Vec3> candidate, std::span<const Vec3> reference, double tau = kDefaultFscoreTau);

double mesh_mse(const TriangleMesh& candidate, std::span<const Vec3> reference,
                std::size_t samples = kDefaultSurfaceSamples, std::uint64_t seed = kDefaultSamplingSeed);
double mesh_mse(const TriangleMesh& candidate, const TriangleMesh& reference,
                std::size_t samples = kDefaultSurfaceSamples, std::uint64_t seed = kDefaultSamplingSeed);
double mesh_fscore(const TriangleMesh& candidate, std::span<const Vec3> reference, double tau = kDefaultFscoreTau,
                   std::size_t samples = kDefaultSurfaceSamples, std::uint64_t seed = kDefaultSamplingSeed);
double mesh_fscore(const TriangleMesh& candidate, const TriangleMesh& reference, double tau = kDefaultFscoreTau,
                   std::size_t samples = kDefaultSurfaceSamples, std::uint64_t seed = kDefaultSamplingSeed);

} // namespace gmp
