// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/geometry.hpp"

#include "gmp/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gmp {

Mat3 rot_x(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 R;
    R << 1, 0, 0, 0, c, -s, 0, s, c;
    return R;
}

Mat3 rot_y(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 R;
    R << c, 0, s, 0, 1, 0, -s, 0, c;
    return R;
}

Mat3 rot_z(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 R;
    R << c, -s, 0, s, c, 0, 0, 0, 1;
    return R;
}

Mat3 exp_so3(const Vec3& rotvec) {
    const double theta = rotvec.norm();
    Mat3 K;
    K << 0, -rotvec.z(), rotvec.y(), rotvec.z(), 0, -rotvec.x(), -rotvec.y(), rotvec.x(), 0;
    if (theta < 1e-8) {
        // second-order Taylor expansion
        return Mat3::Identity() + K + 0.5 * K * K;
    }
    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / (theta * theta);
    return Mat3::Identity() + a * K + b * K * K;
}

Vec3 log_so3(const Mat3& R) {
    const Eigen::AngleAxisd aa(R);
    return aa.angle() * aa.axis();
}

double rotation_distance(const Mat3& a, const Mat3& b) {
    const double c = std::clamp(((a.transpose() * b).trace() - 1.0) * 0.5, -1.0, 1.0);
    // acos loses precision near zero; fall back to the log map there.
    if (c > 0.999) return log_so3(a.transpose() * b).norm();
    return std::acos(c);
}

bool is_rotation(const Mat3& R, double tol) {
    if (!R.allFinite()) return false;
    if (((R.transpose() * R) - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(R.determinant() - 1.0) <= tol;
}

Mat3 orthonormalize(const Mat3& R) {
    Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 U = svd.matrixU();
    const Mat3 V = svd.matrixV();
    if ((U * V.transpose()).determinant() < 0.0) U.col(2) *= -1.0;
    return U * V.transpose();
}

Pose Pose::from_matrix(const Mat4& m) {
    return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

Pose Pose::from_quaternion(const Eigen::Vector4d& wxyz, const Vec3& t) {
    Eigen::Quaterniond q(wxyz[0], wxyz[1], wxyz[2], wxyz[3]);
    if (q.norm() < 1e-12) fail(ErrorCode::InvalidArgument, "zero quaternion");
    q.normalize();
    return {q.toRotationMatrix(), t};
}

Mat4 Pose::matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
}

Eigen::Vector4d Pose::quaternion_wxyz() const {
    Eigen::Quaterniond q(rotation);
    q.normalize();
    if (q.w() < 0.0) q.coeffs() *= -1.0;
    return {q.w(), q.x(), q.y(), q.z()};
}

Pose Pose::inverse() const {
    const Mat3 Rt = rotation.transpose();
    return {Rt, -(Rt * translation)};
}

Vec3 Camera::center() const {
    return -(world_to_camera.rotation.transpose() * world_to_camera.translation);
}

void Camera::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) fail(ErrorCode::InvalidArgument, "camera focal length must be positive");
    if (width < 1 || height < 1) fail(ErrorCode::InvalidArgument, "camera image size must be at least 1x1");
    if (!is_rotation(world_to_camera.rotation)) fail(ErrorCode::InvalidArgument, "camera extrinsic is not a rotation");
}

Camera move_camera_with_world(const Camera& camera, const Pose& motion) {
    Camera moved = camera;
    moved.world_to_camera = camera.world_to_camera * motion.inverse();
    return moved;
}

int sh_degree_from_count(std::size_t count) {
    for (int l = 0; l <= 8; ++l) {
        if (static_cast<std::size_t>(sh_coeff_count(l)) == count) return l;
    }
    return -1;
}

Mat4 SurfelPrimitive::geometry_matrix() const {
    Mat4 H = Mat4::Zero();
    H.block<3, 1>(0, 0) = scale_u * tangent_u;
    H.block<3, 1>(0, 1) = scale_v * tangent_v;
    H.block<3, 1>(0, 3) = center;
    H(3, 3) = 1.0;
    return H;
}

bool is_spd(const Mat3& C) {
    if (!C.allFinite()) return false;
    if ((C - C.transpose()).cwiseAbs().maxCoeff() > kGeometryTol) return false;
    Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (C + C.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > 1e-12;
}

namespace {

void validate_appearance(double opacity, const ShCoeffs& sh, const Mat3& sh_rotation) {
    if (!(opacity >= 0.0 && opacity <= 1.0)) {
        std::ostringstream os;
        os << "opacity " << opacity << " outside [0,1]";
        fail(ErrorCode::InvalidPrimitive, os.str());
    }
    if (sh_degree_from_count(sh.size()) < 0) {
        fail(ErrorCode::InvalidPrimitive, "SH coefficient count is not (L+1)^2");
    }
    if (!is_rotation(sh_rotation)) fail(ErrorCode::InvalidPrimitive, "sh_rotation is not a rotation");
}

} // namespace

void validate(const GaussianPrimitive& g) {
    if (!g.center.allFinite()) fail(ErrorCode::InvalidPrimitive, "non-finite Gaussian center");
    if (g.label < 0) fail(ErrorCode::InvalidPrimitive, "negative instance label");
    if (!is_spd(g.covariance)) fail(ErrorCode::NotSPD, "Gaussian covariance is not SPD");
    validate_appearance(g.opacity, g.sh, g.sh_rotation);
}

void validate(const SurfelPrimitive& s) {
    if (!s.center.allFinite()) fail(ErrorCode::InvalidPrimitive, "non-finite surfel center");
    if (s.label < 0) fail(ErrorCode::InvalidPrimitive, "negative instance label");
    if (std::abs(s.tangent_u.norm() - 1.0) > kGeometryTol || std::abs(s.tangent_v.norm() - 1.0) > kGeometryTol) {
        fail(ErrorCode::InvalidPrimitive, "surfel tangents must be unit length");
    }
    if (std::abs(s.tangent_u.dot(s.tangent_v)) > kGeometryTol) {
        fail(ErrorCode::InvalidPrimitive, "surfel tangents must be orthogonal");
    }
    if (!(s.scale_u > 0.0) || !(s.scale_v > 0.0)) fail(ErrorCode::InvalidPrimitive, "surfel scales must be positive");
    validate_appearance(s.opacity, s.sh, s.sh_rotation);
}

Vec2 project_point(const Camera& camera, const Vec3& p_world) {
    const Vec3 pc = camera.world_to_camera.apply(p_world);
    if (!(pc.z() > 1e-9)) {
        std::ostringstream os;
        os << "camera-frame depth " << pc.z();
        fail(ErrorCode::PointBehindCamera, os.str());
    }
    return {camera.fx * pc.x() / pc.z() + camera.cx, camera.fy * pc.y() / pc.z() + camera.cy};
}

Vec3 surfel_point(const SurfelPrimitive& surfel, double u, double v) {
    return surfel.center + surfel.scale_u * surfel.tangent_u * u + surfel.scale_v * surfel.tangent_v * v;
}

double surfel_weight(double u, double v) { return std::exp(-(u * u + v * v) * 0.5); }

Mat3 transform_covariance(const Mat3& C, const Mat3& R) {
    if (!is_spd(C)) fail(ErrorCode::NotSPD, "covariance is not SPD");
    const Mat3 out = R * C * R.transpose();
    return 0.5 * (out + out.transpose());
}

} // namespace gmp
