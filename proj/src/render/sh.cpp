// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/renderer.hpp"

#include <algorithm>

namespace gmp {

namespace {

constexpr double kC0 = 0.28209479177387814;
constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005, -1.0925484305920792,
                          0.5462742152960396};
constexpr double kC3[] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658, 0.3731763325901154,
                          -0.4570457994644658, 1.445305721320277, -0.5900435899266435};

} // namespace

Vec3 evaluate_sh(const ShCoeffs& sh, const Vec3& view_dir, const Mat3& instance_rotation, int max_degree) {
    if (sh.empty()) return Vec3::Constant(0.5);
    const int degree = std::min({sh_degree_from_count(sh.size()), max_degree, 3});
    Vec3 result = kC0 * sh[0];
    if (degree > 0) {
        const Vec3 d = instance_rotation.transpose() * view_dir;
        const double x = d.x(), y = d.y(), z = d.z();
        result += -kC1 * y * sh[1] + kC1 * z * sh[2] - kC1 * x * sh[3];
        if (degree > 1) {
            const double xx = x * x, yy = y * y, zz = z * z;
            const double xy = x * y, yz = y * z, xz = x * z;
            result += kC2[0] * xy * sh[4] + kC2[1] * yz * sh[5] + kC2[2] * (2.0 * zz - xx - yy) * sh[6] +
                      kC2[3] * xz * sh[7] + kC2[4] * (xx - yy) * sh[8];
            if (degree > 2) {
                result += kC3[0] * y * (3.0 * xx - yy) * sh[9] + kC3[1] * xy * z * sh[10] +
                          kC3[2] * y * (4.0 * zz - xx - yy) * sh[11] +
                          kC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy) * sh[12] +
                          kC3[4] * x * (4.0 * zz - xx - yy) * sh[13] + kC3[5] * z * (xx - yy) * sh[14] +
                          kC3[6] * x * (xx - 3.0 * yy) * sh[15];
            }
        }
    }
    return (result.array() + 0.5).min(1.0).max(0.0).matrix();
}

} // namespace gmp
