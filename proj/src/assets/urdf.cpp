// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/urdf.hpp"

#include "gmp/error.hpp"
#include "gmp/kinematics.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gmp {

namespace pt = boost::property_tree;

Mat3 rpy_to_rotation(const Vec3& rpy) { return rot_z(rpy.z()) * rot_y(rpy.y()) * rot_x(rpy.x()); }

Vec3 rotation_to_rpy(const Mat3& R) {
    const double pitch = std::atan2(-R(2, 0), std::hypot(R(0, 0), R(1, 0)));
    if (std::hypot(R(0, 0), R(1, 0)) < 1e-12) {
        return {0.0, pitch, std::atan2(-R(0, 1), R(1, 1))};
    }
    return {std::atan2(R(2, 1), R(2, 2)), pitch, std::atan2(R(1, 0), R(0, 0))};
}

Pose UrdfOrigin::pose() const { return {rpy_to_rotation(rpy), xyz}; }

UrdfOrigin UrdfOrigin::from_pose(const Pose& pose) { return {pose.translation, rotation_to_rpy(pose.rotation)}; }

Mat3 UrdfInertial::inertia_matrix() const {
    const auto& i = inertia;
    Mat3 m;
    m << i[0], i[1], i[2], i[1], i[3], i[4], i[2], i[4], i[5];
    return m;
}

const UrdfLink* UrdfModel::link(const std::string& name) const {
    for (const auto& l : links) {
        if (l.name == name) return &l;
    }
    return nullptr;
}

std::string UrdfModel::root_link() const {
    std::set<std::string> children;
    for (const auto& j : joints) children.insert(j.child);
    std::vector<std::string> roots;
    for (const auto& l : links) {
        if (!children.count(l.name)) roots.push_back(l.name);
    }
    if (roots.empty()) fail(ErrorCode::CyclicJointGraph, "every link has a parent joint");
    if (roots.size() > 1) fail(ErrorCode::ParseError, "links '" + roots[0] + "' and '" + roots[1] + "' are both roots");
    return roots.front();
}

std::size_t UrdfModel::count_joints(const std::string& type) const {
    return static_cast<std::size_t>(
        std::count_if(joints.begin(), joints.end(), [&](const UrdfJoint& j) { return j.type == type; }));
}

void validate(const UrdfModel& model) {
    if (model.links.empty()) fail(ErrorCode::ParseError, "robot has no links");
    std::set<std::string> names;
    for (const auto& l : model.links) {
        if (!names.insert(l.name).second) fail(ErrorCode::ParseError, "duplicate link '" + l.name + "'");
        if (l.inertial && !(l.inertial->mass > 0.0)) {
            fail(ErrorCode::ParseError, "link '" + l.name + "' has non-positive mass");
        }
    }
    std::map<std::string, std::string> parent_of;
    std::multimap<std::string, std::string> children_of;
    std::set<std::string> joint_names;
    for (const auto& j : model.joints) {
        if (!joint_names.insert(j.name).second) fail(ErrorCode::ParseError, "duplicate joint '" + j.name + "'");
        for (const auto* end : {&j.parent, &j.child}) {
            if (!names.count(*end)) fail(ErrorCode::ParseError, "joint '" + j.name + "' references unknown link '" + *end + "'");
        }
        if (!parent_of.emplace(j.child, j.parent).second) {
            fail(ErrorCode::ParseError, "link '" + j.child + "' has more than one parent joint");
        }
        children_of.emplace(j.parent, j.child);
    }
    const std::string root = model.root_link();
    std::set<std::string> reached{root};
    std::vector<std::string> stack{root};
    while (!stack.empty()) {
        const std::string cur = stack.back();
        stack.pop_back();
        const auto [lo, hi] = children_of.equal_range(cur);
        for (auto it = lo; it != hi; ++it) {
            if (reached.insert(it->second).second) stack.push_back(it->second);
        }
    }
    if (reached.size() != names.size()) fail(ErrorCode::CyclicJointGraph, "joint graph contains a cycle");
}

namespace {

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string vec(const Vec3& v) { return num(v.x()) + " " + num(v.y()) + " " + num(v.z()); }

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

void write_origin(std::ostream& os, const UrdfOrigin& o, const std::string& indent) {
    os << indent << "<origin xyz=\"" << vec(o.xyz) << "\" rpy=\"" << vec(o.rpy) << "\"/>\n";
}

void write_geometry(std::ostream& os, const std::string& tag, const std::string& file) {
    os << "    <" << tag << ">\n      <geometry>\n        <mesh filename=\"" << escape(file)
       << "\"/>\n      </geometry>\n    </" << tag << ">\n";
}

} // namespace

std::string write_urdf(const UrdfModel& model) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\"?>\n<robot name=\"" << escape(model.name) << "\">\n";
    for (const auto& l : model.links) {
        const bool empty = !l.inertial && l.visual_mesh.empty() && l.collision_mesh.empty();
        os << "  <link name=\"" << escape(l.name) << "\"" << (empty ? "/>\n" : ">\n");
        if (empty) continue;
        if (l.inertial) {
            const auto& in = *l.inertial;
            os << "    <inertial>\n";
            write_origin(os, in.origin, "      ");
            os << "      <mass value=\"" << num(in.mass) << "\"/>\n";
            os << "      <inertia ixx=\"" << num(in.inertia[0]) << "\" ixy=\"" << num(in.inertia[1]) << "\" ixz=\""
               << num(in.inertia[2]) << "\" iyy=\"" << num(in.inertia[3]) << "\" iyz=\"" << num(in.inertia[4])
               << "\" izz=\"" << num(in.inertia[5]) << "\"/>\n";
            os << "    </inertial>\n";
        }
        if (!l.visual_mesh.empty()) write_geometry(os, "visual", l.visual_mesh);
        if (!l.collision_mesh.empty()) write_geometry(os, "collision", l.collision_mesh);
        os << "  </link>\n";
    }
    for (const auto& j : model.joints) {
        os << "  <joint name=\"" << escape(j.name) << "\" type=\"" << escape(j.type) << "\">\n";
        os << "    <parent link=\"" << escape(j.parent) << "\"/>\n";
        os << "    <child link=\"" << escape(j.child) << "\"/>\n";
        write_origin(os, j.origin, "    ");
        if (j.type != "fixed") os << "    <axis xyz=\"" << vec(j.axis) << "\"/>\n";
        if (j.limit) {
            os << "    <limit lower=\"" << num(j.limit->lower) << "\" upper=\"" << num(j.limit->upper)
               << "\" effort=\"" << num(j.limit->effort) << "\" velocity=\"" << num(j.limit->velocity) << "\"/>\n";
        }
        if (j.type != "fixed") {
            os << "    <dynamics damping=\"" << num(j.damping) << "\" friction=\"" << num(j.friction) << "\"/>\n";
        }
        os << "  </joint>\n";
    }
    os << "</robot>\n";
    return os.str();
}

namespace {

struct Reader {
    std::string source;

    [[noreturn]] void error(const std::string& where, const std::string& msg) const {
        fail(ErrorCode::ParseError, source + ": " + where + ": " + msg);
    }

    std::vector<double> numbers(const std::string& text, const std::string& where) const {
        std::vector<double> out;
        const char* p = text.data();
        const char* end = p + text.size();
        while (p < end) {
            while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
            if (p == end) break;
            double v = 0.0;
            const auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc() || (res.ptr < end && !std::isspace(static_cast<unsigned char>(*res.ptr)))) {
                error(where, "malformed number list '" + text + "'");
            }
            out.push_back(v);
            p = res.ptr;
        }
        return out;
    }

    double scalar(const pt::ptree& node, const std::string& attr, const std::string& where,
                  std::optional<double> fallback = std::nullopt) const {
        const auto text = node.get_optional<std::string>("<xmlattr>." + attr);
        if (!text) {
            if (fallback) return *fallback;
            error(where, "missing attribute '" + attr + "'");
        }
        const auto v = numbers(*text, where + "@" + attr);
        if (v.size() != 1) error(where + "@" + attr, "expected one number");
        return v[0];
    }

    Vec3 triple(const pt::ptree& node, const std::string& attr, const std::string& where, const Vec3& fallback) const {
        const auto text = node.get_optional<std::string>("<xmlattr>." + attr);
        if (!text) return fallback;
        const auto v = numbers(*text, where + "@" + attr);
        if (v.size() != 3) error(where + "@" + attr, "expected three numbers");
        return {v[0], v[1], v[2]};
    }

    std::string attribute(const pt::ptree& node, const std::string& attr, const std::string& where) const {
        const auto text = node.get_optional<std::string>("<xmlattr>." + attr);
        if (!text || text->empty()) error(where, "missing attribute '" + attr + "'");
        return *text;
    }

    UrdfOrigin origin(const pt::ptree& parent, const std::string& where) const {
        UrdfOrigin o;
        if (const auto node = parent.get_child_optional("origin")) {
            o.xyz = triple(*node, "xyz", where + ".origin", Vec3::Zero());
            o.rpy = triple(*node, "rpy", where + ".origin", Vec3::Zero());
        }
        return o;
    }

    std::string mesh_file(const pt::ptree& link, const std::string& tag) const {
        const auto node = link.get_child_optional(tag + ".geometry.mesh.<xmlattr>.filename");
        return node ? node->get_value<std::string>() : std::string();
    }
};

} // namespace

UrdfModel parse_urdf_string(const std::string& xml, const std::string& source) {
    pt::ptree tree;
    try {
        std::istringstream is(xml);
        pt::read_xml(is, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        fail(ErrorCode::ParseError, source + ": line " + std::to_string(e.line()) + ": " + e.message());
    }
    const auto robot = tree.get_child_optional("robot");
    if (!robot) fail(ErrorCode::ParseError, source + ": missing <robot> element");
    const Reader r{source};
    UrdfModel model;
    model.name = robot->get<std::string>("<xmlattr>.name", "robot");
    for (const auto& [tag, node] : *robot) {
        if (tag == "link") {
            UrdfLink link;
            link.name = r.attribute(node, "name", "link");
            const std::string where = "link '" + link.name + "'";
            if (const auto in = node.get_child_optional("inertial")) {
                UrdfInertial inertial;
                inertial.origin = r.origin(*in, where + ".inertial");
                const auto mass = in->get_child_optional("mass");
                if (!mass) r.error(where, "inertial without <mass>");
                inertial.mass = r.scalar(*mass, "value", where + ".mass");
                if (const auto I = in->get_child_optional("inertia")) {
                    const char* keys[] = {"ixx", "ixy", "ixz", "iyy", "iyz", "izz"};
                    for (int k = 0; k < 6; ++k) inertial.inertia[k] = r.scalar(*I, keys[k], where + ".inertia", 0.0);
                } else {
                    r.error(where, "inertial without <inertia>");
                }
                link.inertial = inertial;
            }
            link.visual_mesh = r.mesh_file(node, "visual");
            link.collision_mesh = r.mesh_file(node, "collision");
            model.links.push_back(std::move(link));
        } else if (tag == "joint") {
            UrdfJoint joint;
            joint.name = r.attribute(node, "name", "joint");
            const std::string where = "joint '" + joint.name + "'";
            joint.type = r.attribute(node, "type", where);
            static const std::set<std::string> kTypes{"revolute", "continuous", "prismatic", "fixed", "floating", "planar"};
            if (!kTypes.count(joint.type)) r.error(where, "unknown joint type '" + joint.type + "'");
            const auto parent = node.get_child_optional("parent");
            const auto child = node.get_child_optional("child");
            if (!parent || !child) r.error(where, "joint needs <parent> and <child>");
            joint.parent = r.attribute(*parent, "link", where + ".parent");
            joint.child = r.attribute(*child, "link", where + ".child");
            joint.origin = r.origin(node, where);
            if (const auto axis = node.get_child_optional("axis")) {
                joint.axis = r.triple(*axis, "xyz", where + ".axis", Vec3::UnitX());
            }
            if (const auto lim = node.get_child_optional("limit")) {
                joint.limit = UrdfLimit{r.scalar(*lim, "lower", where + ".limit", 0.0),
                                        r.scalar(*lim, "upper", where + ".limit", 0.0),
                                        r.scalar(*lim, "effort", where + ".limit"),
                                        r.scalar(*lim, "velocity", where + ".limit")};
            } else if (joint.type == "revolute" || joint.type == "prismatic") {
                r.error(where, "joint requires <limit>");
            }
            if (const auto dyn = node.get_child_optional("dynamics")) {
                joint.damping = r.scalar(*dyn, "damping", where + ".dynamics", 0.0);
                joint.friction = r.scalar(*dyn, "friction", where + ".dynamics", 0.0);
            }
            model.joints.push_back(std::move(joint));
        }
    }
    validate(model);
    return model;
}

UrdfModel parse_urdf(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_urdf_string(ss.str(), path.string());
}

namespace {

std::string link_name(const MDHChain& chain, std::size_t i) {
    return chain.links[i].name.empty() ? "link_" + std::to_string(i + 1) : chain.links[i].name;
}

UrdfInertial default_inertial(const TriangleMesh& local_mesh, double mass) {
    Eigen::AlignedBox3d box;
    for (const Vec3& v : local_mesh.vertices) box.extend(v);
    const Vec3 e = box.sizes().cwiseMax(1e-6);
    UrdfInertial in;
    in.origin.xyz = box.center();
    in.mass = mass;
    in.inertia = {mass / 12.0 * (e.y() * e.y() + e.z() * e.z()), 0.0, 0.0,
                  mass / 12.0 * (e.x() * e.x() + e.z() * e.z()), 0.0,
                  mass / 12.0 * (e.x() * e.x() + e.y() * e.y())};
    return in;
}

struct SceneUrdf {
    UrdfModel model;
    std::vector<std::pair<std::string, TriangleMesh>> meshes; // relative path, link-frame mesh
};

SceneUrdf build_scene_urdf(const SceneAsset& asset, const std::string& mesh_dir) {
    if (!asset.chain) fail(ErrorCode::NoChain, "scene has no kinematic chain");
    const MDHChain& chain = *asset.chain;
    chain.validate();
    const std::vector<double> q0(chain.revolute_count(), 0.0);
    const std::vector<Pose> rest = forward_kinematics(chain, q0);

    SceneUrdf out;
    out.model.name = asset.name;
    out.model.links.push_back({"base_link", std::nullopt, "", ""});
    std::string parent = "base_link";
    for (std::size_t i = 0; i < chain.links.size(); ++i) {
        const MDHLink& l = chain.links[i];
        const TriangleMesh* mesh = asset.mesh_for(l.label);
        if (!mesh) {
            fail(ErrorCode::MissingMesh, "link '" + link_name(chain, i) + "' has no mesh for label " + std::to_string(l.label));
        }
        const Pose to_link = rest[i].inverse();
        TriangleMesh local = transform_mesh(*mesh, to_link);

        UrdfLink link;
        link.name = link_name(chain, i);
        const std::string file = mesh_dir + "/" + link.name + ".obj";
        link.visual_mesh = file;
        link.collision_mesh = file;
        const auto body = std::find_if(asset.bodies.begin(), asset.bodies.end(),
                                       [&](const RigidState& b) { return b.label == l.label; });
        if (body != asset.bodies.end()) {
            UrdfInertial in;
            in.origin = UrdfOrigin::from_pose(to_link * body->pose);
            in.mass = body->mass;
            const Mat3& I = body->inertia;
            in.inertia = {I(0, 0), I(0, 1), I(0, 2), I(1, 1), I(1, 2), I(2, 2)};
            link.inertial = in;
        } else {
            link.inertial = default_inertial(local, asset.physics.link_mass);
        }
        out.model.links.push_back(link);
        out.meshes.emplace_back(file, std::move(local));

        UrdfJoint joint;
        joint.name = "joint_" + std::to_string(i + 1);
        joint.type = l.joint_type == JointType::Revolute ? "revolute" : "fixed";
        joint.parent = parent;
        joint.child = link.name;
        const Pose local_joint = Pose::from_matrix(link_transform(l, 0.0));
        joint.origin = UrdfOrigin::from_pose(i == 0 ? chain.base_pose * local_joint : local_joint);
        joint.axis = Vec3::UnitZ();
        if (l.joint_type == JointType::Revolute) {
            joint.limit = UrdfLimit{-kDefaultJointLimit, kDefaultJointLimit, kDefaultJointEffort, kDefaultJointVelocity};
            joint.damping = asset.physics.joint_damping;
            joint.friction = asset.physics.joint_friction;
        }
        out.model.joints.push_back(joint);
        parent = link.name;
    }
    validate(out.model);
    return out;
}

} // namespace

UrdfModel urdf_from_scene(const SceneAsset& asset, const std::string& mesh_dir) {
    return build_scene_urdf(asset, mesh_dir).model;
}

UrdfModel emit_urdf(const SceneAsset& asset, const std::filesystem::path& out_dir) {
    SceneUrdf built = build_scene_urdf(asset, "meshes");
    std::filesystem::create_directories(out_dir / "meshes");
    for (const auto& [file, mesh] : built.meshes) write_obj(out_dir / file, mesh);
    std::ofstream os(out_dir / "robot.urdf", std::ios::binary);
    if (!os) fail(ErrorCode::IoError, "cannot write " + (out_dir / "robot.urdf").string());
    os << write_urdf(built.model);
    return built.model;
}

} // namespace gmp
