// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/renderer.hpp"

#include "gmp/error.hpp"
#include "gmp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gmp {

void RenderConfig::validate() const {
    if (tile_size < 1) fail(ErrorCode::InvalidArgument, "tile_size must be at least 1");
    if (!(alpha_cutoff > 0.0 && alpha_cutoff < 1.0)) fail(ErrorCode::InvalidArgument, "alpha_cutoff must lie in (0,1)");
    if (!(transmittance_floor >= 0.0 && transmittance_floor < 1.0)) {
        fail(ErrorCode::InvalidArgument, "transmittance_floor must lie in [0,1)");
    }
}

ProjectedGaussian project_gaussian_2d(const Camera& camera, const GaussianPrimitive& g) {
    const Mat3& W = camera.world_to_camera.rotation;
    const Vec3 t = camera.world_to_camera.apply(g.center);
    if (!(t.z() > kNearPlane)) fail(ErrorCode::PointBehindCamera, "Gaussian center in front of the near plane");
    const double inv_z = 1.0 / t.z();
    Eigen::Matrix<double, 2, 3> J;
    J << camera.fx * inv_z, 0.0, -camera.fx * t.x() * inv_z * inv_z,
         0.0, camera.fy * inv_z, -camera.fy * t.y() * inv_z * inv_z;
    const Eigen::Matrix<double, 2, 3> M = J * W;
    Mat2 cov = M * g.covariance * M.transpose();
    cov = 0.5 * (cov + cov.transpose());
    cov += kScreenDilation * Mat2::Identity();
    const Vec2 mean(camera.fx * t.x() * inv_z + camera.cx, camera.fy * t.y() * inv_z + camera.cy);
    return {mean, cov, t.z()};
}

Vec3 composite_pixel(std::span<const Splat> ordered, const Vec3& background, double transmittance_floor) {
    Vec3 color = Vec3::Zero();
    double T = 1.0;
    for (const Splat& s : ordered) {
        color += s.alpha * T * s.rgb;
        T *= 1.0 - s.alpha;
        if (T < transmittance_floor) break;
    }
    return color + T * background;
}

namespace {

struct PreparedSplat {
    Vec2 mean;
    double conic_xx, conic_xy, conic_yy;
    double opacity;
    Vec3 rgb;
    double depth;
    int label;
    int x0, x1, y0, y1; // inclusive pixel bounds
};

// Per-pixel accumulator shared by both rasterizers.
struct PixelAccumulator {
    Vec3 color = Vec3::Zero();
    double T = 1.0;
    int label = -1;
    double depth = 0.0;
    bool done = false;

    void add(double alpha, const Vec3& rgb, int splat_label, double splat_depth, double floor) {
        color += alpha * T * rgb;
        T *= 1.0 - alpha;
        if (label < 0 && 1.0 - T > 0.5) {
            label = splat_label;
            depth = splat_depth;
        }
        if (T < floor) done = true;
    }
};

void finish(const PixelAccumulator& acc, const RenderConfig& config, RenderOutput& out, std::size_t idx) {
    out.color[idx] = acc.color + acc.T * config.background;
    out.instance_map[idx] = acc.label;
    out.depth[idx] = acc.depth;
}

RenderOutput blank_output(const Camera& camera, const RenderConfig& config) {
    RenderOutput out;
    out.width = camera.width;
    out.height = camera.height;
    const auto n = static_cast<std::size_t>(camera.width) * static_cast<std::size_t>(camera.height);
    out.color.assign(n, config.background);
    out.instance_map.assign(n, -1);
    out.depth.assign(n, 0.0);
    return out;
}

bool label_enabled(const RenderConfig& config, int label) {
    return !config.label_filter || config.label_filter->count(label) > 0;
}

} // namespace

RenderOutput render(std::span<const GaussianPrimitive> gaussians, const Camera& camera, const RenderConfig& config) {
    camera.validate();
    config.validate();
    RenderOutput out = blank_output(camera, config);
    const Vec3 eye = camera.center();

    std::vector<PreparedSplat> splats;
    std::vector<std::size_t> source;
    for (std::size_t i = 0; i < gaussians.size(); ++i) {
        const GaussianPrimitive& g = gaussians[i];
        if (!label_enabled(config, g.label) || !(g.opacity >= config.alpha_cutoff)) continue;
        if (!(camera.world_to_camera.apply(g.center).z() > kNearPlane)) continue;
        const ProjectedGaussian p = project_gaussian_2d(camera, g);
        const double det = p.cov.determinant();
        if (!(det > 0.0) || !p.cov.allFinite() || !p.mean.allFinite()) continue;

        // alpha >= cutoff  <=>  d^T cov^-1 d <= 2 ln(opacity / cutoff)
        const double m = 2.0 * std::log(g.opacity / config.alpha_cutoff);
        const double ext_x = std::sqrt(m * p.cov(0, 0)) + 1.0;
        const double ext_y = std::sqrt(m * p.cov(1, 1)) + 1.0;
        // pixel x samples x + 0.5
        const int x0 = std::max(0, static_cast<int>(std::floor(p.mean.x() - ext_x - 0.5)));
        const int x1 = std::min(camera.width - 1, static_cast<int>(std::ceil(p.mean.x() + ext_x - 0.5)));
        const int y0 = std::max(0, static_cast<int>(std::floor(p.mean.y() - ext_y - 0.5)));
        const int y1 = std::min(camera.height - 1, static_cast<int>(std::ceil(p.mean.y() + ext_y - 0.5)));
        if (x0 > x1 || y0 > y1) continue;

        const Mat2 conic = p.cov.inverse();
        Vec3 dir = g.center - eye;
        dir.normalize();
        splats.push_back({p.mean, conic(0, 0), conic(0, 1), conic(1, 1), g.opacity,
                          evaluate_sh(g.sh, dir, g.sh_rotation, config.sh_degree), p.depth, g.label, x0, x1, y0, y1});
        source.push_back(i);
    }

    std::vector<std::size_t> order(splats.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (splats[a].depth != splats[b].depth) return splats[a].depth < splats[b].depth;
        return source[a] < source[b];
    });

    const int ts = config.tile_size;
    const int tiles_x = (camera.width + ts - 1) / ts;
    const int tiles_y = (camera.height + ts - 1) / ts;
    std::vector<std::vector<std::size_t>> bins(static_cast<std::size_t>(tiles_x) * static_cast<std::size_t>(tiles_y));
    for (std::size_t k : order) {
        const PreparedSplat& s = splats[k];
        for (int ty = s.y0 / ts; ty <= s.y1 / ts; ++ty) {
            for (int tx = s.x0 / ts; tx <= s.x1 / ts; ++tx) {
                bins[static_cast<std::size_t>(ty * tiles_x + tx)].push_back(k);
            }
        }
    }

    parallel_for(bins.size(), [&](std::size_t tile) {
        const int tx = static_cast<int>(tile) % tiles_x;
        const int ty = static_cast<int>(tile) / tiles_x;
        const auto& bin = bins[tile];
        for (int y = ty * ts; y < std::min(camera.height, (ty + 1) * ts); ++y) {
            for (int x = tx * ts; x < std::min(camera.width, (tx + 1) * ts); ++x) {
                PixelAccumulator acc;
                const double px = x + 0.5, py = y + 0.5;
                for (std::size_t k : bin) {
                    const PreparedSplat& s = splats[k];
                    if (x < s.x0 || x > s.x1 || y < s.y0 || y > s.y1) continue;
                    const double dx = px - s.mean.x(), dy = py - s.mean.y();
                    const double power = -0.5 * (s.conic_xx * dx * dx + 2.0 * s.conic_xy * dx * dy + s.conic_yy * dy * dy);
                    if (power > 0.0) continue;
                    const double alpha = std::min(1.0, s.opacity * std::exp(power));
                    if (alpha < config.alpha_cutoff) continue;
                    acc.add(alpha, s.rgb, s.label, s.depth, config.transmittance_floor);
                    if (acc.done) break;
                }
                finish(acc, config, out, out.index(x, y));
            }
        }
    });
    return out;
}

Vec3 pixel_ray(const Camera& camera, int x, int y) {
    const Vec3 cam_dir((x + 0.5 - camera.cx) / camera.fx, (y + 0.5 - camera.cy) / camera.fy, 1.0);
    return (camera.world_to_camera.rotation.transpose() * cam_dir).normalized();
}

std::optional<Vec2> surfel_ray_uv(const SurfelPrimitive& surfel, const Vec3& origin, const Vec3& direction) {
    const Vec3 n = surfel.normal();
    const Vec3 d = direction.normalized();
    const double denom = n.dot(d);
    if (std::abs(denom) < 1e-9 * n.norm()) return std::nullopt;
    const double t = n.dot(surfel.center - origin) / denom;
    if (!(t > 0.0)) return std::nullopt;
    const Vec3 offset = origin + t * d - surfel.center;
    return Vec2(offset.dot(surfel.tangent_u) / surfel.scale_u, offset.dot(surfel.tangent_v) / surfel.scale_v);
}

RenderOutput render_surfels(std::span<const SurfelPrimitive> surfels, const Camera& camera, const RenderConfig& config) {
    camera.validate();
    config.validate();
    RenderOutput out = blank_output(camera, config);
    const Vec3 eye = camera.center();

    struct Prepared {
        std::size_t index;
        double depth;
        Vec3 rgb;
    };
    std::vector<Prepared> prepared;
    for (std::size_t i = 0; i < surfels.size(); ++i) {
        const SurfelPrimitive& s = surfels[i];
        if (!label_enabled(config, s.label) || !(s.opacity >= config.alpha_cutoff)) continue;
        const double depth = camera.world_to_camera.apply(s.center).z();
        if (!(depth > kNearPlane)) continue;
        prepared.push_back({i, depth, evaluate_sh(s.sh, (s.center - eye).normalized(), s.sh_rotation, config.sh_degree)});
    }
    std::sort(prepared.begin(), prepared.end(), [](const Prepared& a, const Prepared& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.index < b.index;
    });

    parallel_for(static_cast<std::size_t>(camera.height), [&](std::size_t row) {
        const int y = static_cast<int>(row);
        for (int x = 0; x < camera.width; ++x) {
            const Vec3 dir = pixel_ray(camera, x, y);
            PixelAccumulator acc;
            for (const Prepared& p : prepared) {
                const SurfelPrimitive& s = surfels[p.index];
                const auto uv = surfel_ray_uv(s, eye, dir);
                if (!uv) continue;
                const double alpha = std::min(1.0, s.opacity * surfel_weight(uv->x(), uv->y()));
                if (alpha < config.alpha_cutoff) continue;
                acc.add(alpha, p.rgb, s.label, p.depth, config.transmittance_floor);
                if (acc.done) break;
            }
            finish(acc, config, out, out.index(x, y));
        }
    });
    return out;
}

} // namespace gmp
