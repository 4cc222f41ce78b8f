// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include "gmp/mesh_tools.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace gmp::testing {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vec3 random_vec3(Rng& rng, double lo, double hi) {
    return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

Mat3 random_rotation(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    q.normalize();
    return q.toRotationMatrix();
}

Pose random_pose(Rng& rng, double translation_range) {
    return {random_rotation(rng), random_vec3(rng, -translation_range, translation_range)};
}

Mat3 random_spd(Rng& rng, double lo, double hi) {
    const Mat3 R = random_rotation(rng);
    const Vec3 e = random_vec3(rng, lo, hi);
    Mat3 C = R * e.asDiagonal() * R.transpose();
    return 0.5 * (C + C.transpose());
}

ShCoeffs random_sh(Rng& rng, int degree) {
    ShCoeffs sh;
    for (int i = 0; i < sh_coeff_count(degree); ++i) sh.push_back(random_vec3(rng, i == 0 ? -1.0 : -0.3, i == 0 ? 1.0 : 0.3));
    return sh;
}

MDHChain random_chain(Rng& rng, int n_links) {
    MDHChain chain;
    chain.base_pose = random_pose(rng, 1.0);
    for (int i = 0; i < n_links; ++i) {
        MDHLink l;
        l.a = uniform(rng, -0.5, 0.5);
        l.alpha = uniform(rng, -M_PI, M_PI);
        l.d = uniform(rng, -0.5, 0.5);
        l.theta_offset = uniform(rng, -M_PI, M_PI);
        l.label = i + 1;
        l.name = "link_" + std::to_string(i + 1);
        chain.links.push_back(l);
    }
    return chain;
}

Camera look_at_camera(const Vec3& eye, const Vec3& target, const Vec3& up, double focal, int width, int height) {
    const Vec3 z = (target - eye).normalized();
    const Vec3 y = -(up - up.dot(z) * z).normalized();
    const Vec3 x = y.cross(z);
    Camera c;
    c.fx = c.fy = focal;
    c.cx = 0.5 * width;
    c.cy = 0.5 * height;
    c.width = width;
    c.height = height;
    c.world_to_camera.rotation.row(0) = x;
    c.world_to_camera.rotation.row(1) = y;
    c.world_to_camera.rotation.row(2) = z;
    c.world_to_camera.translation = -(c.world_to_camera.rotation * eye);
    return c;
}

std::vector<GaussianPrimitive> random_gaussians_in_view(Rng& rng, const Camera& camera, int count, int sh_degree) {
    std::vector<GaussianPrimitive> out;
    const Pose to_world = camera.world_to_camera.inverse();
    for (int i = 0; i < count; ++i) {
        const double u = uniform(rng, -0.1, 1.1) * camera.width;
        const double v = uniform(rng, -0.1, 1.1) * camera.height;
        const double z = uniform(rng, 2.0, 6.0);
        const Vec3 pc((u - camera.cx) * z / camera.fx, (v - camera.cy) * z / camera.fy, z);
        GaussianPrimitive g;
        g.center = to_world.apply(pc);
        g.covariance = random_spd(rng, 1e-4, 4e-3);
        g.opacity = uniform(rng, 0.05, 1.0);
        g.sh = random_sh(rng, sh_degree);
        g.sh_rotation = random_rotation(rng);
        g.label = static_cast<int>(rng() % 4);
        out.push_back(g);
    }
    return out;
}

RenderOutput reference_render(std::span<const GaussianPrimitive> gaussians, const Camera& camera,
                              const RenderConfig& config) {
    struct Item {
        std::size_t index;
        double depth;
        Vec2 mean;
        Mat2 inv_cov;
        Vec3 rgb;
    };
    const Mat3& W = camera.world_to_camera.rotation;
    const Vec3 eye = -(W.transpose() * camera.world_to_camera.translation);
    std::vector<Item> items;
    for (std::size_t i = 0; i < gaussians.size(); ++i) {
        const GaussianPrimitive& g = gaussians[i];
        if (config.label_filter && !config.label_filter->count(g.label)) continue;
        if (g.opacity < config.alpha_cutoff) continue;
        const Vec3 t = W * g.center + camera.world_to_camera.translation;
        if (t.z() <= kNearPlane) continue;
        // d(u, v) / d(x, y, z) of the pinhole model
        Eigen::Matrix<double, 2, 3> J;
        J << camera.fx / t.z(), 0.0, -camera.fx * t.x() / (t.z() * t.z()),
             0.0, camera.fy / t.z(), -camera.fy * t.y() / (t.z() * t.z());
        Mat2 cov = J * W * g.covariance * W.transpose() * J.transpose();
        cov = 0.5 * (cov + cov.transpose()) + 0.3 * Mat2::Identity();
        if (!(cov.determinant() > 0.0)) continue;
        const Vec2 mean(camera.fx * t.x() / t.z() + camera.cx, camera.fy * t.y() / t.z() + camera.cy);
        items.push_back({i, t.z(), mean, cov.inverse(),
                         evaluate_sh(g.sh, (g.center - eye).normalized(), g.sh_rotation, config.sh_degree)});
    }
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.depth < b.depth; });

    RenderOutput out;
    out.width = camera.width;
    out.height = camera.height;
    for (int y = 0; y < camera.height; ++y) {
        for (int x = 0; x < camera.width; ++x) {
            Vec3 c = Vec3::Zero();
            double T = 1.0;
            int label = -1;
            double depth = 0.0;
            for (const Item& it : items) {
                const Vec2 d = Vec2(x + 0.5, y + 0.5) - it.mean;
                const double power = -0.5 * d.dot(it.inv_cov * d);
                if (power > 0.0) continue;
                const double alpha = std::min(1.0, gaussians[it.index].opacity * std::exp(power));
                if (alpha < config.alpha_cutoff) continue;
                c += T * alpha * it.rgb;
                T *= 1.0 - alpha;
                if (label < 0 && T < 0.5) {
                    label = gaussians[it.index].label;
                    depth = it.depth;
                }
                if (T < config.transmittance_floor) break;
            }
            out.color.push_back(c + T * config.background);
            out.instance_map.push_back(label);
            out.depth.push_back(depth);
        }
    }
    return out;
}

std::vector<Mat4> naive_forward_kinematics(const MDHChain& chain, std::span<const double> q) {
    auto rx = [](double a) {
        Mat4 m = Mat4::Identity();
        m(1, 1) = std::cos(a);
        m(1, 2) = -std::sin(a);
        m(2, 1) = std::sin(a);
        m(2, 2) = std::cos(a);
        return m;
    };
    auto rz = [](double a) {
        Mat4 m = Mat4::Identity();
        m(0, 0) = std::cos(a);
        m(0, 1) = -std::sin(a);
        m(1, 0) = std::sin(a);
        m(1, 1) = std::cos(a);
        return m;
    };
    auto tx = [](double v) {
        Mat4 m = Mat4::Identity();
        m(0, 3) = v;
        return m;
    };
    auto tz = [](double v) {
        Mat4 m = Mat4::Identity();
        m(2, 3) = v;
        return m;
    };
    std::vector<Mat4> out;
    Mat4 T = chain.base_pose.matrix();
    std::size_t j = 0;
    for (const auto& l : chain.links) {
        const double theta = (l.joint_type == JointType::Revolute ? q[j++] : 0.0) + l.theta_offset;
        T = T * rx(l.alpha) * tx(l.a) * rz(theta) * tz(l.d);
        out.push_back(T);
    }
    return out;
}

TriangleMesh box_mesh(const Vec3& center, const Vec3& h, int label) {
    TriangleMesh m;
    m.label = label;
    for (int i = 0; i < 8; ++i) {
        m.vertices.push_back(center + Vec3((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z()));
    }
    // Counter-clockwise seen from outside.
    m.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
               {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
    return m;
}

TriangleMesh sphere_mesh(const Vec3& center, double radius, int label, int rings, int segments) {
    TriangleMesh m;
    m.label = label;
    m.vertices.push_back(center + Vec3(0.0, radius, 0.0));
    for (int r = 1; r < rings; ++r) {
        const double phi = M_PI * r / rings;
        for (int s = 0; s < segments; ++s) {
            const double th = 2.0 * M_PI * s / segments;
            m.vertices.push_back(center + radius * Vec3(std::sin(phi) * std::cos(th), std::cos(phi), std::sin(phi) * std::sin(th)));
        }
    }
    m.vertices.push_back(center - Vec3(0.0, radius, 0.0));
    const int south = static_cast<int>(m.vertices.size()) - 1;
    auto ring = [&](int r, int s) { return 1 + (r - 1) * segments + (s % segments); };
    for (int s = 0; s < segments; ++s) m.faces.push_back({0, ring(1, s + 1), ring(1, s)});
    for (int r = 1; r < rings - 1; ++r) {
        for (int s = 0; s < segments; ++s) {
            m.faces.push_back({ring(r, s), ring(r, s + 1), ring(r + 1, s)});
            m.faces.push_back({ring(r, s + 1), ring(r + 1, s + 1), ring(r + 1, s)});
        }
    }
    for (int s = 0; s < segments; ++s) m.faces.push_back({south, ring(rings - 1, s), ring(rings - 1, s + 1)});
    return m;
}

TriangleMesh merge_meshes(const TriangleMesh& a, const TriangleMesh& b) {
    TriangleMesh m = a;
    const int offset = static_cast<int>(a.vertices.size());
    m.vertices.insert(m.vertices.end(), b.vertices.begin(), b.vertices.end());
    for (Face f : b.faces) {
        for (int& v : f) v += offset;
        m.faces.push_back(f);
    }
    return m;
}

std::vector<GaussianPrimitive> gaussians_on_mesh(const TriangleMesh& mesh, int count, double sigma, const Vec3& rgb,
                                                 int sh_degree, std::uint64_t seed) {
    std::vector<GaussianPrimitive> out;
    for (const Vec3& p : sample_surface(mesh, static_cast<std::size_t>(count), seed)) {
        GaussianPrimitive g;
        g.center = p;
        g.covariance = sigma * sigma * Mat3::Identity();
        g.opacity = 0.95;
        g.sh.assign(static_cast<std::size_t>(sh_coeff_count(sh_degree)), Vec3::Zero());
        g.sh[0] = (rgb - Vec3::Constant(0.5)) / 0.28209479177387814;
        g.label = mesh.label;
        out.push_back(g);
    }
    return out;
}

namespace {

MDHChain arm_chain() {
    MDHChain chain;
    chain.base_pose = Pose::from_rotation(rot_x(-M_PI / 2.0)); // joint 1 axis points up
    const double params[6][3] = {{0.0, 0.0, 0.25}, {0.0, -M_PI / 2, 0.0}, {0.35, 0.0, 0.0},
                                 {0.05, -M_PI / 2, 0.3}, {0.0, M_PI / 2, 0.0}, {0.0, -M_PI / 2, 0.08}};
    for (int i = 0; i < 6; ++i) {
        MDHLink l;
        l.a = params[i][0];
        l.alpha = params[i][1];
        l.d = params[i][2];
        l.label = i + 1;
        l.name = "link_" + std::to_string(i + 1);
        chain.links.push_back(l);
    }
    return chain;
}

const Vec3 kLinkColors[8] = {{0.85, 0.3, 0.25}, {0.3, 0.75, 0.3}, {0.25, 0.35, 0.85}, {0.85, 0.8, 0.2},
                             {0.7, 0.3, 0.8},   {0.2, 0.8, 0.85}, {0.9, 0.55, 0.15}, {0.55, 0.55, 0.6}};

void frame_scene(SceneAsset& a, double focal_scale) {
    Eigen::AlignedBox3d box;
    for (const auto& m : a.meshes) {
        for (const Vec3& v : m.vertices) box.extend(v);
    }
    const Vec3 target = box.center();
    const double radius = 0.5 * box.diagonal().norm();
    const Vec3 eye = target + 2.6 * radius * Vec3(0.25, 0.35, 1.0).normalized();
    a.camera = look_at_camera(eye, target, Vec3::UnitY(), focal_scale * 256.0, 256, 256);
}

} // namespace

SceneAsset six_link_arm_scene() {
    SceneAsset a;
    a.name = "six_link_arm";
    a.sh_degree = 1;
    a.chain = arm_chain();
    const MDHChain& chain = *a.chain;
    const std::vector<double> q0(6, 0.0);
    const auto rest = forward_kinematics(chain, q0);
    for (std::size_t i = 0; i < 6; ++i) {
        TriangleMesh local;
        if (i < 5) {
            const Vec3 next = Pose::from_matrix(link_transform(chain.links[i + 1], 0.0)).translation;
            const Vec3 half = 0.5 * next.cwiseAbs() + Vec3::Constant(0.035);
            local = box_mesh(0.5 * next, half, static_cast<int>(i) + 1);
        } else {
            local = sphere_mesh(Vec3(0.0, 0.0, 0.18), 0.045, 6);
        }
        a.meshes.push_back(transform_mesh(local, rest[i]));
    }
    for (std::size_t i = 0; i < 6; ++i) {
        const int count = i == 5 ? 200 : 250;
        auto g = gaussians_on_mesh(a.meshes[i], count, 0.01, kLinkColors[i], a.sh_degree, 100 + i);
        a.gaussians.insert(a.gaussians.end(), g.begin(), g.end());
    }
    frame_scene(a, 0.9);
    return a;
}

SceneAsset push_box_scene() {
    SceneAsset a = six_link_arm_scene();
    a.name = "push_box";
    const double h = 0.05;
    const Vec3 box_center(0.6, h, 0.3);
    const Vec3 block_center(1.2, 0.08, 0.3);
    a.meshes.push_back(box_mesh(box_center, Vec3::Constant(h), 7));
    a.meshes.push_back(box_mesh(block_center, Vec3::Constant(0.08), 8));
    for (int k = 0; k < 2; ++k) {
        const TriangleMesh& m = a.meshes[a.meshes.size() - 2 + static_cast<std::size_t>(k)];
        auto g = gaussians_on_mesh(m, 300, 0.01, kLinkColors[6 + k], a.sh_degree, 200 + static_cast<std::uint64_t>(k));
        a.gaussians.insert(a.gaussians.end(), g.begin(), g.end());
    }
    auto body = [](const Vec3& c, double half, double mass, int label) {
        RigidState b;
        b.pose = Pose::from_translation(c);
        b.mass = mass;
        b.inertia = (mass * (2.0 * half) * (2.0 * half) / 6.0) * Mat3::Identity();
        b.label = label;
        for (int i = 0; i < 4; ++i) b.contact_points.emplace_back((i & 1) ? half : -half, -half, (i & 2) ? half : -half);
        return b;
    };
    a.bodies = {body(box_center, h, 0.5, 7), body(block_center, 0.08, 2.0, 8)};
    a.contact.friction_mu = 0.3;
    a.wrenches = {{7, 0.0, 0.3, {Vec3(3.0, 0.0, 0.0), Vec3::Zero()}}};
    frame_scene(a, 1.0);
    return a;
}

std::vector<int> object_labels(const SceneAsset& asset) {
    std::set<int> chain_labels;
    if (asset.chain) {
        for (const auto& l : asset.chain->links) chain_labels.insert(l.label);
    }
    std::vector<int> out;
    for (int l : asset.labels()) {
        if (!chain_labels.count(l)) out.push_back(l);
    }
    return out;
}

RigidState sliding_box(double v0, int label) {
    RigidState b;
    b.mass = 1.0;
    b.inertia = (1.0 / 6.0) * 0.01 * Mat3::Identity();
    b.label = label;
    b.linear_velocity = Vec3(v0, 0.0, 0.0);
    ContactParams defaults;
    b.pose.translation = Vec3(0.0, -b.mass * 9.81 / defaults.stiffness, 0.0);
    return b;
}

TempDir::TempDir() {
    std::string templ = (std::filesystem::temp_directory_path() / "gmp_test_XXXXXX").string();
    if (!mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
    path = templ;
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::filesystem::path fixture_dir() { return GMP_FIXTURE_DIR; }

} // namespace gmp::testing
