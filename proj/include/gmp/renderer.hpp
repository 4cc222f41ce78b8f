// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gmp/geometry.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace gmp {

struct RenderConfig {
    int tile_size = 16;
    double alpha_cutoff = 1.0 / 255.0;
    double transmittance_floor = 1e-4;
    Vec3 background = Vec3::Zero();
    int sh_degree = kDefaultShDegree; // highest band evaluated
    std::optional<std::set<int>> label_filter; // render only these labels

    void validate() const;
};

struct RenderOutput {
    int width = 0;
    int height = 0;
    std::vector<Vec3> color;       // row-major, y down
    std::vector<int> instance_map; // -1 = background
    std::vector<double> depth;     // camera z of the instance splat, 0 for background

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x); }
    const Vec3& color_at(int x, int y) const { return color[index(x, y)]; }
    int instance_at(int x, int y) const { return instance_map[index(x, y)]; }
};

inline constexpr double kNearPlane = 1e-3;
inline constexpr double kScreenDilation = 0.3; // px^2 added to the 2D covariance

struct ProjectedGaussian {
    Vec2 mean;
    Mat2 cov;
    double depth;
};

/// Local-affine projection: cov2d = J W C W^T J^T + 0.3 I.
ProjectedGaussian project_gaussian_2d(const Camera& camera, const GaussianPrimitive& g);

/// Real SH radiance at R^T d, offset by 0.5 and clamped to [0,1]. Bands above
/// min(max_degree, 3) are ignored.
Vec3 evaluate_sh(const ShCoeffs& sh, const Vec3& view_dir, const Mat3& instance_rotation = Mat3::Identity(),
                 int max_degree = kDefaultShDegree);

struct Splat {
    double alpha;
    Vec3 rgb;
};

/// Front-to-back "over" compositing; stops once transmittance falls below
/// the floor.
Vec3 composite_pixel(std::span<const Splat> ordered, const Vec3& background, double transmittance_floor = 1e-4);

/// Tile-binned Gaussian rasterizer. Pixel (x, y) samples the image plane at
/// (x + 0.5, y + 0.5). The instance label of a pixel is that of the splat at
/// which accumulated opacity first exceeds 0.5.
RenderOutput render(std::span<const GaussianPrimitive> gaussians, const Camera& camera, const RenderConfig& config = {});

/// Ray/tangent-plane intersection in surfel (u, v) coordinates. Empty when
/// the ray is parallel to the plane (|cos| < 1e-9) or hits behind the origin.
std::optional<Vec2> surfel_ray_uv(const SurfelPrimitive& surfel, const Vec3& origin, const Vec3& direction);

/// World-space ray direction (unit) through the sample point of pixel (x, y).
Vec3 pixel_ray(const Camera& camera, int x, int y);

RenderOutput render_surfels(std::span<const SurfelPrimitive> surfels, const Camera& camera,
                            const RenderConfig& config = {});

void write_ppm(const std::filesystem::path& path, const RenderOutput& image);
/// Labels stored +1 (0 = background); 16-bit big-endian when a label exceeds 254.
void write_label_pgm(const std::filesystem::path& path, const RenderOutput& image);

struct LabelImage {
    int width = 0;
    int height = 0;
    std::vector<int> labels; // -1 = background
};

LabelImage read_label_pgm(const std::filesystem::path& path);

} // namespace gmp
