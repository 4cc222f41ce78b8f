// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <vector>

namespace gmp {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Tolerance used for orthonormality and symmetry checks.
inline constexpr double kGeometryTol = 1e-9;

Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

/// Rodrigues map from a rotation vector to SO(3).
Mat3 exp_so3(const Vec3& rotvec);
/// Inverse of exp_so3; angle in [0, pi].
Vec3 log_so3(const Mat3& R);
/// Geodesic distance between two rotations, radians.
double rotation_distance(const Mat3& a, const Mat3& b);

bool is_rotation(const Mat3& R, double tol = kGeometryTol);
/// Nearest rotation in the Frobenius sense (SVD polar factor, det +1).
Mat3 orthonormalize(const Mat3& R);

/// Rigid transform x -> R x + t.
struct Pose {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static Pose identity() { return {}; }
    static Pose from_matrix(const Mat4& m);
    /// Unit quaternion in (w, x, y, z) order; normalized on entry.
    static Pose from_quaternion(const Eigen::Vector4d& wxyz, const Vec3& t);
    static Pose from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }
    static Pose from_rotation(const Mat3& R) { return {R, Vec3::Zero()}; }

    Mat4 matrix() const;
    Eigen::Vector4d quaternion_wxyz() const;
    Pose inverse() const;
    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    Vec3 rotate(const Vec3& v) const { return rotation * v; }

    Pose operator*(const Pose& rhs) const {
        return {rotation * rhs.rotation, rotation * rhs.translation + translation};
    }
};

inline Pose compose(const Pose& a, const Pose& b) { return a * b; }

struct Camera {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 1;
    int height = 1;
    Pose world_to_camera;

    /// Camera center in world coordinates.
    Vec3 center() const;
    /// Throws InvalidArgument on non-positive focal length or image size.
    void validate() const;
};

/// Returns the camera obtained by moving the world by `motion`; rendering the
/// moved scene with it reproduces the original view.
Camera move_camera_with_world(const Camera& camera, const Pose& motion);

inline constexpr int kDefaultShDegree = 3;

inline int sh_coeff_count(int degree) { return (degree + 1) * (degree + 1); }
/// Degree from the number of per-channel coefficients; -1 if not a square.
int sh_degree_from_count(std::size_t count);

/// Radiance coefficients, one RGB triple per SH basis function.
using ShCoeffs = std::vector<Vec3>;

struct GaussianPrimitive {
    Vec3 center = Vec3::Zero();
    double opacity = 1.0;
    Mat3 covariance = Mat3::Identity();
    ShCoeffs sh = ShCoeffs(1, Vec3::Zero());
    // Accumulated instance rotation. Radiance is looked up at R^T d instead of
    // rotating the coefficients.
    Mat3 sh_rotation = Mat3::Identity();
    int label = 0;

    int sh_degree() const { return sh_degree_from_count(sh.size()); }
};

struct SurfelPrimitive {
    Vec3 center = Vec3::Zero();
    Vec3 tangent_u = Vec3::UnitX();
    Vec3 tangent_v = Vec3::UnitY();
    double scale_u = 1.0;
    double scale_v = 1.0;
    double opacity = 1.0;
    ShCoeffs sh = ShCoeffs(1, Vec3::Zero());
    Mat3 sh_rotation = Mat3::Identity();
    int label = 0;

    Vec3 normal() const { return tangent_u.cross(tangent_v); }
    /// Homogeneous matrix [s_u t_u, s_v t_v, 0, x_p; 0 0 0 1].
    Mat4 geometry_matrix() const;
};

/// Symmetric within 1e-9 and smallest eigenvalue > 1e-12.
bool is_spd(const Mat3& C);

/// Throws InvalidPrimitive / NotSPD when the primitive breaks its invariants.
void validate(const GaussianPrimitive& g);
void validate(const SurfelPrimitive& s);

Vec2 project_point(const Camera& camera, const Vec3& p_world);

Vec3 surfel_point(const SurfelPrimitive& surfel, double u, double v);
double surfel_weight(double u, double v);

/// R C R^T; throws NotSPD if C is not SPD.
Mat3 transform_covariance(const Mat3& C, const Mat3& R);

} // namespace gmp
