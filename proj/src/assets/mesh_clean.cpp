// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/error.hpp"
#include "gmp/mesh_tools.hpp"
#include "gmp/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

namespace gmp {

std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 p = dir.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-300) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = origin - a;
    const double u = s.dot(p) * inv;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 q = s.cross(e1);
    const double v = dir.dot(q) * inv;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    return e2.dot(q) * inv;
}

TriangleBvh::TriangleBvh(const TriangleMesh& mesh) : mesh_(mesh), order_(mesh.faces.size()) {
    std::iota(order_.begin(), order_.end(), 0u);
    if (!order_.empty()) {
        nodes_.reserve(2 * order_.size());
        build(0, static_cast<std::uint32_t>(order_.size()));
    }
}

std::uint32_t TriangleBvh::build(std::uint32_t first, std::uint32_t count) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Eigen::AlignedBox3d box;
    Eigen::AlignedBox3d centroids;
    for (std::uint32_t i = first; i < first + count; ++i) {
        Vec3 c = Vec3::Zero();
        for (int k = 0; k < 3; ++k) {
            box.extend(mesh_.corner(order_[i], k));
            c += mesh_.corner(order_[i], k) / 3.0;
        }
        centroids.extend(c);
    }
    nodes_[index].box = box;
    if (count <= 4) {
        nodes_[index].first = first;
        nodes_[index].count = count;
        return index;
    }
    int axis = 0;
    centroids.sizes().maxCoeff(&axis);
    const auto centroid = [&](std::uint32_t f) {
        return mesh_.corner(f, 0)[axis] + mesh_.corner(f, 1)[axis] + mesh_.corner(f, 2)[axis];
    };
    const std::uint32_t half = count / 2;
    std::nth_element(order_.begin() + first, order_.begin() + first + half, order_.begin() + first + count,
                     [&](std::uint32_t a, std::uint32_t b) { return centroid(a) < centroid(b); });
    build(first, half);
    const std::uint32_t right = build(first + half, count - half);
    nodes_[index].right = right;
    return index;
}

namespace {

bool slab_hit(const Eigen::AlignedBox3d& box, const Vec3& origin, const Vec3& inv_dir, double t_min, double t_max) {
    for (int k = 0; k < 3; ++k) {
        double t0 = (box.min()[k] - origin[k]) * inv_dir[k];
        double t1 = (box.max()[k] - origin[k]) * inv_dir[k];
        if (t0 > t1) std::swap(t0, t1);
        // NaN from 0 * inf leaves the bounds untouched.
        if (t0 > t_min) t_min = t0;
        if (t1 < t_max) t_max = t1;
        if (t_min > t_max) return false;
    }
    return true;
}

} // namespace

std::optional<TriangleBvh::Hit> TriangleBvh::intersect(const Vec3& origin, const Vec3& dir, double t_min,
                                                       double t_max) const {
    if (nodes_.empty()) return std::nullopt;
    const Vec3 inv_dir = dir.cwiseInverse();
    std::optional<Hit> best;
    std::uint32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (!slab_hit(node.box, origin, inv_dir, t_min, best ? best->t : t_max)) continue;
        if (node.count > 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const std::uint32_t f = order_[i];
                const auto t = ray_triangle(origin, dir, mesh_.corner(f, 0), mesh_.corner(f, 1), mesh_.corner(f, 2));
                if (t && *t > t_min && *t < (best ? best->t : t_max)) best = Hit{*t, f};
            }
        } else {
            const auto self = static_cast<std::uint32_t>(&node - nodes_.data());
            stack[top++] = node.right;
            stack[top++] = self + 1;
        }
    }
    return best;
}

std::vector<Vec3> sphere_directions(int count) {
    std::vector<Vec3> out;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double y = 1.0 - 2.0 * (i + 0.5) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
        const double phi = golden * i;
        out.emplace_back(r * std::cos(phi), y, r * std::sin(phi));
    }
    return out;
}

std::vector<int> face_components(const TriangleMesh& mesh) {
    std::map<std::array<double, 3>, int> welded;
    std::vector<int> canonical(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& v = mesh.vertices[i];
        canonical[i] = welded.emplace(std::array<double, 3>{v.x(), v.y(), v.z()}, static_cast<int>(welded.size()))
                           .first->second;
    }
    std::vector<int> parent(welded.size());
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Face& f : mesh.faces) {
        const int r0 = find(canonical[f[0]]);
        for (int k = 1; k < 3; ++k) {
            const int rk = find(canonical[f[k]]);
            if (rk != r0) parent[rk] = r0;
        }
    }
    std::map<int, int> ids;
    std::vector<int> out;
    out.reserve(mesh.faces.size());
    for (const Face& f : mesh.faces) {
        out.push_back(ids.emplace(find(canonical[f[0]]), static_cast<int>(ids.size())).first->second);
    }
    return out;
}

namespace {

TriangleMesh select_faces(const TriangleMesh& mesh, const std::vector<char>& keep) {
    TriangleMesh out;
    out.label = mesh.label;
    std::vector<int> remap(mesh.vertices.size(), -1);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        if (!keep[f]) continue;
        Face nf{};
        for (int k = 0; k < 3; ++k) {
            int& r = remap[static_cast<std::size_t>(mesh.faces[f][k])];
            if (r < 0) {
                r = static_cast<int>(out.vertices.size());
                out.vertices.push_back(mesh.vertices[static_cast<std::size_t>(mesh.faces[f][k])]);
            }
            nf[k] = r;
        }
        out.faces.push_back(nf);
    }
    // Keep the original vertex order for untouched meshes.
    if (out.faces.size() == mesh.faces.size()) {
        std::vector<char> used(mesh.vertices.size(), 0);
        for (const Face& f : mesh.faces) {
            for (int v : f) used[static_cast<std::size_t>(v)] = 1;
        }
        if (std::all_of(used.begin(), used.end(), [](char u) { return u != 0; })) return mesh;
    }
    return out;
}

std::vector<char> small_component_filter(const TriangleMesh& mesh, double fraction) {
    const std::vector<int> comp = face_components(mesh);
    std::vector<std::size_t> sizes;
    for (int c : comp) {
        if (static_cast<std::size_t>(c) >= sizes.size()) sizes.resize(static_cast<std::size_t>(c) + 1, 0);
        ++sizes[static_cast<std::size_t>(c)];
    }
    const double largest = static_cast<double>(*std::max_element(sizes.begin(), sizes.end()));
    std::vector<char> keep(mesh.faces.size());
    for (std::size_t f = 0; f < keep.size(); ++f) {
        keep[f] = static_cast<double>(sizes[static_cast<std::size_t>(comp[f])]) >= fraction * largest;
    }
    return keep;
}

std::vector<char> visibility_filter(const TriangleMesh& mesh, int samples) {
    Eigen::AlignedBox3d box;
    for (const Vec3& v : mesh.vertices) box.extend(v);
    const Vec3 center = box.center();
    double radius = 0.0;
    for (const Vec3& v : mesh.vertices) radius = std::max(radius, (v - center).norm());
    std::vector<Vec3> eyes;
    for (const Vec3& d : sphere_directions(samples)) eyes.push_back(center + 2.0 * radius * d);

    const TriangleBvh bvh(mesh);
    constexpr std::array<std::array<double, 3>, 4> kBary{{{1.0 / 3, 1.0 / 3, 1.0 / 3},
                                                          {2.0 / 3, 1.0 / 6, 1.0 / 6},
                                                          {1.0 / 6, 2.0 / 3, 1.0 / 6},
                                                          {1.0 / 6, 1.0 / 6, 2.0 / 3}}};
    std::vector<char> visible(mesh.faces.size(), 0);
    parallel_for(mesh.faces.size(), [&](std::size_t f) {
        for (const auto& b : kBary) {
            const Vec3 p = b[0] * mesh.corner(f, 0) + b[1] * mesh.corner(f, 1) + b[2] * mesh.corner(f, 2);
            for (const Vec3& eye : eyes) {
                if (!bvh.intersect(eye, p - eye, 0.0, 1.0 - 1e-7)) {
                    visible[f] = 1;
                    return;
                }
            }
        }
    });
    return visible;
}

} // namespace

TriangleMesh clean_mesh(const TriangleMesh& mesh, double min_component_fraction, int visibility_samples) {
    validate(mesh);
    if (!(min_component_fraction >= 0.0) || min_component_fraction > 1.0) {
        fail(ErrorCode::InvalidArgument, "min_component_fraction must lie in [0, 1]");
    }
    if (visibility_samples < 1) fail(ErrorCode::InvalidArgument, "visibility_samples must be positive");
    if (mesh.faces.empty()) fail(ErrorCode::EmptyResult, "mesh has no faces to keep");
    TriangleMesh current = mesh;
    while (true) {
        std::vector<char> keep = small_component_filter(current, min_component_fraction);
        const std::vector<char> visible = visibility_filter(current, visibility_samples);
        bool changed = false;
        for (std::size_t f = 0; f < keep.size(); ++f) {
            keep[f] = keep[f] && visible[f];
            changed = changed || !keep[f];
        }
        if (std::none_of(keep.begin(), keep.end(), [](char k) { return k != 0; })) {
            fail(ErrorCode::EmptyResult, "mesh cleaning removed every face");
        }
        if (!changed) return select_faces(current, keep);
        current = select_faces(current, keep);
    }
}

} // namespace gmp
