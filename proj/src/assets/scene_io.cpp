// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/error.hpp"
#include "gmp/json_io.hpp"
#include "gmp/scene.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gmp {

using json_io::Json;

std::vector<int> SceneAsset::labels() const {
    std::set<int> s;
    for (const auto& m : meshes) s.insert(m.label);
    return {s.begin(), s.end()};
}

const TriangleMesh* SceneAsset::mesh_for(int label) const {
    for (const auto& m : meshes) {
        if (m.label == label) return &m;
    }
    return nullptr;
}

void SceneAsset::validate() const {
    std::set<int> mesh_labels;
    for (const auto& m : meshes) {
        if (!mesh_labels.insert(m.label).second) {
            fail(ErrorCode::ParseError, "label " + std::to_string(m.label) + " has more than one mesh");
        }
    }
    auto require = [&](int label, const std::string& who) {
        if (!mesh_labels.count(label)) {
            fail(ErrorCode::ParseError, who + " references label " + std::to_string(label) + " which has no mesh");
        }
    };
    for (std::size_t i = 0; i < gaussians.size(); ++i) {
        require(gaussians[i].label, "Gaussian " + std::to_string(i));
        if (gaussians[i].sh_degree() != sh_degree) {
            fail(ErrorCode::ParseError, "Gaussian " + std::to_string(i) + " SH degree differs from the scene degree");
        }
    }
    if (chain) {
        chain->validate();
        for (const auto& link : chain->links) require(link.label, "chain link '" + link.name + "'");
    }
    for (const auto& b : bodies) require(b.label, "body");
    if (binding && binding->records.size() != gaussians.size()) {
        fail(ErrorCode::ParseError, "binding has " + std::to_string(binding->records.size()) + " records for " +
                                        std::to_string(gaussians.size()) + " Gaussians");
    }
    if (joint_trajectory && chain) joint_trajectory->validate(chain->revolute_count());
}

namespace {

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorCode::IoError, "cannot read " + path.string());
    try {
        return Json::parse(is);
    } catch (const Json::parse_error& e) {
        fail(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorCode::IoError, "cannot write " + path.string());
    os << text;
}

std::string joint_name(JointType t) { return t == JointType::Revolute ? "revolute" : "fixed"; }

Json chain_to_json(const MDHChain& chain) {
    Json links = Json::array();
    for (const auto& l : chain.links) {
        links.push_back({{"name", l.name}, {"label", l.label}, {"a", l.a}, {"alpha", l.alpha}, {"d", l.d},
                         {"theta_offset", l.theta_offset}, {"joint", joint_name(l.joint_type)}});
    }
    return {{"base_pose", json_io::to_json(chain.base_pose)}, {"links", links}};
}

MDHChain chain_from_json(const Json& j) {
    MDHChain chain;
    if (j.contains("base_pose")) chain.base_pose = json_io::pose(j["base_pose"], "chain.base_pose");
    const Json& links = json_io::member(j, "links", "chain");
    if (!links.is_array()) fail(ErrorCode::ParseError, "field 'chain.links': expected an array");
    for (std::size_t i = 0; i < links.size(); ++i) {
        const std::string where = "chain.links[" + std::to_string(i) + "]";
        const Json& lj = links[i];
        MDHLink l;
        l.name = lj.value("name", "link_" + std::to_string(i + 1));
        l.label = json_io::integer(lj, "label", where);
        l.a = json_io::number_or(lj, "a", 0.0, where);
        l.alpha = json_io::number_or(lj, "alpha", 0.0, where);
        l.d = json_io::number_or(lj, "d", 0.0, where);
        l.theta_offset = json_io::number_or(lj, "theta_offset", 0.0, where);
        const std::string joint = lj.value("joint", "revolute");
        if (joint == "revolute") {
            l.joint_type = JointType::Revolute;
        } else if (joint == "fixed") {
            l.joint_type = JointType::Fixed;
        } else {
            fail(ErrorCode::ParseError, "field '" + where + ".joint': unknown joint type '" + joint + "'");
        }
        chain.links.push_back(l);
    }
    return chain;
}

Json body_to_json(const RigidState& b) {
    Json points = Json::array();
    for (const Vec3& p : b.contact_points) points.push_back(json_io::to_json(p));
    return {{"label", b.label},
            {"mass", b.mass},
            {"inertia", json_io::to_json(b.inertia)},
            {"pose", json_io::to_json(b.pose)},
            {"linear_velocity", json_io::to_json(b.linear_velocity)},
            {"angular_velocity", json_io::to_json(b.angular_velocity)},
            {"contact_points", points}};
}

RigidState body_from_json(const Json& j, const std::string& where) {
    RigidState b;
    b.label = json_io::integer(j, "label", where);
    b.mass = json_io::number(j, "mass", where);
    if (j.contains("inertia")) b.inertia = json_io::mat3(j["inertia"], where + ".inertia");
    if (j.contains("pose")) b.pose = json_io::pose(j["pose"], where + ".pose");
    if (j.contains("linear_velocity")) b.linear_velocity = json_io::vec3(j["linear_velocity"], where + ".linear_velocity");
    if (j.contains("angular_velocity")) b.angular_velocity = json_io::vec3(j["angular_velocity"], where + ".angular_velocity");
    if (j.contains("contact_points")) {
        const Json& pts = j["contact_points"];
        if (!pts.is_array()) fail(ErrorCode::ParseError, "field '" + where + ".contact_points': expected an array");
        for (std::size_t k = 0; k < pts.size(); ++k) {
            b.contact_points.push_back(json_io::vec3(pts[k], where + ".contact_points[" + std::to_string(k) + "]"));
        }
    }
    try {
        b.validate();
    } catch (const Error& e) {
        fail(ErrorCode::ParseError, "field '" + where + "': " + e.what());
    }
    return b;
}

Json contact_to_json(const ContactParams& c) {
    return {{"ground_height", c.ground_height},     {"stiffness", c.stiffness},
            {"damping", c.damping_contact},         {"friction_mu", c.friction_mu},
            {"linear_damping", c.linear_damping},   {"gravity", json_io::to_json(c.gravity)},
            {"ground_enabled", c.ground_enabled}};
}

ContactParams contact_from_json(const Json& j) {
    const std::string w = "contact";
    ContactParams c;
    c.ground_height = json_io::number_or(j, "ground_height", c.ground_height, w);
    c.stiffness = json_io::number_or(j, "stiffness", c.stiffness, w);
    c.damping_contact = json_io::number_or(j, "damping", c.damping_contact, w);
    c.friction_mu = json_io::number_or(j, "friction_mu", c.friction_mu, w);
    c.linear_damping = json_io::number_or(j, "linear_damping", c.linear_damping, w);
    if (j.contains("gravity")) c.gravity = json_io::vec3(j["gravity"], "contact.gravity");
    if (j.contains("ground_enabled")) c.ground_enabled = j["ground_enabled"].get<bool>();
    try {
        c.validate();
    } catch (const Error& e) {
        fail(ErrorCode::ParseError, std::string("field 'contact': ") + e.what());
    }
    return c;
}

Json camera_to_json(const Camera& c) {
    return {{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy}, {"width", c.width}, {"height", c.height},
            {"world_to_camera", json_io::to_json(c.world_to_camera)}};
}

Camera camera_from_json(const Json& j) {
    const std::string w = "camera";
    Camera c;
    c.fx = json_io::number(j, "fx", w);
    c.fy = json_io::number(j, "fy", w);
    c.cx = json_io::number(j, "cx", w);
    c.cy = json_io::number(j, "cy", w);
    c.width = json_io::integer(j, "width", w);
    c.height = json_io::integer(j, "height", w);
    if (j.contains("world_to_camera")) c.world_to_camera = json_io::pose(j["world_to_camera"], "camera.world_to_camera");
    try {
        c.validate();
    } catch (const Error& e) {
        fail(ErrorCode::ParseError, std::string("field 'camera': ") + e.what());
    }
    return c;
}

Json binding_to_json(const BindingMap& b) {
    Json records = Json::array();
    for (const auto& r : b.records) {
        records.push_back({r.gaussian_index, r.label, r.face_index, r.barycentric.x(), r.barycentric.y(),
                           r.barycentric.z(), r.normal_offset, r.tangent_offset.x(), r.tangent_offset.y()});
    }
    Json meshes = Json::object();
    for (const auto& [label, idx] : b.mesh_of_label) meshes[std::to_string(label)] = idx;
    return {{"fields", {"gaussian", "label", "face", "b0", "b1", "b2", "normal_offset", "t0", "t1"}},
            {"mesh_of_label", meshes},
            {"records", records}};
}

BindingMap binding_from_json(const Json& j, const std::filesystem::path& path) {
    BindingMap b;
    const std::string w = path.string();
    for (const auto& [key, value] : json_io::member(j, "mesh_of_label", w).items()) {
        b.mesh_of_label[std::stoi(key)] = value.get<std::size_t>();
    }
    const Json& records = json_io::member(j, "records", w);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const Json& r = records[i];
        if (!r.is_array() || r.size() != 9) {
            fail(ErrorCode::ParseError, w + ": binding record " + std::to_string(i) + " must have 9 fields");
        }
        BindingRecord rec;
        rec.gaussian_index = r[0].get<int>();
        rec.label = r[1].get<int>();
        rec.face_index = r[2].get<int>();
        rec.barycentric = Vec3(r[3].get<double>(), r[4].get<double>(), r[5].get<double>());
        rec.normal_offset = r[6].get<double>();
        rec.tangent_offset = Vec2(r[7].get<double>(), r[8].get<double>());
        if (rec.gaussian_index != static_cast<int>(i)) {
            fail(ErrorCode::ParseError, w + ": binding record " + std::to_string(i) + " is out of order");
        }
        b.records.push_back(rec);
    }
    return b;
}

Json wrenches_to_json(const WrenchSchedule& schedule) {
    Json out = Json::array();
    for (const auto& p : schedule) {
        out.push_back({{"label", p.label}, {"t_start", p.t_start}, {"t_end", p.t_end},
                       {"force", json_io::to_json(p.wrench.force)}, {"torque", json_io::to_json(p.wrench.torque)}});
    }
    return out;
}

WrenchSchedule wrenches_from_json(const Json& j) {
    WrenchSchedule out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = "wrenches[" + std::to_string(i) + "]";
        WrenchPulse p;
        p.label = json_io::integer(j[i], "label", w);
        p.t_start = json_io::number(j[i], "t_start", w);
        p.t_end = json_io::number(j[i], "t_end", w);
        if (j[i].contains("force")) p.wrench.force = json_io::vec3(j[i]["force"], w + ".force");
        if (j[i].contains("torque")) p.wrench.torque = json_io::vec3(j[i]["torque"], w + ".torque");
        out.push_back(p);
    }
    return out;
}

std::string dump_pretty(const Json& j) { return j.dump(2) + "\n"; }

} // namespace

void save_scene(const SceneAsset& asset, const std::filesystem::path& dir) {
    asset.validate();
    std::filesystem::create_directories(dir / "meshes");

    Json manifest;
    manifest["format"] = "gmpsim-scene";
    manifest["schema_version"] = kSceneSchemaVersion;
    manifest["units"] = {{"length", "meters"}, {"time", "seconds"}, {"angle", "radians"}};
    manifest["convention"] = "y-up right-handed";
    manifest["name"] = asset.name;
    manifest["sh_degree"] = asset.sh_degree;
    manifest["camera"] = camera_to_json(asset.camera);
    Json meshes = Json::array();
    for (const auto& m : asset.meshes) {
        const std::string file = "meshes/mesh_" + std::to_string(m.label) + ".obj";
        write_obj(dir / file, m);
        meshes.push_back({{"label", m.label}, {"file", file}});
    }
    manifest["meshes"] = meshes;
    manifest["gaussians"] = "gaussians.ply";
    write_gaussian_ply(dir / "gaussians.ply", asset.gaussians, asset.sh_degree);
    if (asset.binding) {
        manifest["binding"] = "binding.json";
        write_text(dir / "binding.json", binding_to_json(*asset.binding).dump() + "\n");
    }
    if (asset.chain) manifest["chain"] = chain_to_json(*asset.chain);
    Json bodies = Json::array();
    for (const auto& b : asset.bodies) bodies.push_back(body_to_json(b));
    manifest["bodies"] = bodies;
    manifest["contact"] = contact_to_json(asset.contact);
    manifest["wrenches"] = wrenches_to_json(asset.wrenches);
    manifest["physics"] = {{"link_mass", asset.physics.link_mass},
                           {"joint_damping", asset.physics.joint_damping},
                           {"joint_friction", asset.physics.joint_friction}};
    if (asset.joint_trajectory) {
        manifest["joint_trajectory"] = "trajectory.jsonl";
        write_joint_trajectory(dir / "trajectory.jsonl", *asset.joint_trajectory);
    }
    if (!asset.pose_tracks.empty()) {
        manifest["pose_tracks"] = "tracks.jsonl";
        write_pose_tracks(dir / "tracks.jsonl", asset.pose_tracks);
    }
    write_text(dir / "manifest.json", dump_pretty(manifest));
}

SceneAsset load_scene(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path)) fail(ErrorCode::IoError, "no scene manifest at " + manifest_path.string());
    const Json m = read_json_file(manifest_path);
    if (!m.is_object()) fail(ErrorCode::ParseError, manifest_path.string() + ": manifest must be a JSON object");
    const int version = json_io::integer(m, "schema_version", "manifest");
    if (version != kSceneSchemaVersion) {
        fail(ErrorCode::SchemaVersionMismatch, "scene schema " + std::to_string(version) + ", expected " +
                                                   std::to_string(kSceneSchemaVersion));
    }

    SceneAsset a;
    a.name = m.value("name", "scene");
    a.sh_degree = m.contains("sh_degree") ? json_io::integer(m, "sh_degree", "manifest") : kDefaultShDegree;
    a.camera = camera_from_json(json_io::member(m, "camera", "manifest"));
    const Json& meshes = json_io::member(m, "meshes", "manifest");
    for (std::size_t i = 0; i < meshes.size(); ++i) {
        const std::string w = "meshes[" + std::to_string(i) + "]";
        const int label = json_io::integer(meshes[i], "label", w);
        const auto file = json_io::member(meshes[i], "file", w).get<std::string>();
        try {
            a.meshes.push_back(read_obj(dir / file, label));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::IoError) fail(ErrorCode::ParseError, "field '" + w + ".file': " + e.what());
            throw;
        }
    }
    if (m.contains("gaussians")) a.gaussians = read_gaussian_ply(dir / m["gaussians"].get<std::string>());
    if (m.contains("binding")) {
        const auto path = dir / m["binding"].get<std::string>();
        a.binding = binding_from_json(read_json_file(path), path);
    }
    if (m.contains("chain")) a.chain = chain_from_json(m["chain"]);
    if (m.contains("bodies")) {
        for (std::size_t i = 0; i < m["bodies"].size(); ++i) {
            a.bodies.push_back(body_from_json(m["bodies"][i], "bodies[" + std::to_string(i) + "]"));
        }
    }
    if (m.contains("contact")) a.contact = contact_from_json(m["contact"]);
    if (m.contains("wrenches")) a.wrenches = wrenches_from_json(m["wrenches"]);
    if (m.contains("physics")) {
        const Json& p = m["physics"];
        a.physics.link_mass = json_io::number_or(p, "link_mass", a.physics.link_mass, "physics");
        a.physics.joint_damping = json_io::number_or(p, "joint_damping", a.physics.joint_damping, "physics");
        a.physics.joint_friction = json_io::number_or(p, "joint_friction", a.physics.joint_friction, "physics");
    }
    if (m.contains("joint_trajectory")) {
        a.joint_trajectory = read_trajectory_file(dir / m["joint_trajectory"].get<std::string>()).joints;
    }
    if (m.contains("pose_tracks")) a.pose_tracks = read_trajectory_file(dir / m["pose_tracks"].get<std::string>()).tracks;
    for (std::size_t i = 0; i < a.gaussians.size(); ++i) {
        try {
            validate(a.gaussians[i]);
        } catch (const Error& e) {
            fail(ErrorCode::ParseError, "Gaussian " + std::to_string(i) + ": " + e.what());
        }
    }
    a.validate();
    return a;
}

TrajectoryFile read_trajectory_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorCode::IoError, "cannot read " + path.string());
    TrajectoryFile out;
    std::map<int, std::size_t> track_of_label;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            fail(ErrorCode::ParseError, where + ": " + e.what());
        }
        try {
            const double t = json_io::number(j, "t", "record");
            bool used = false;
            if (j.contains("q")) {
                const Json& q = j["q"];
                if (!q.is_array()) fail(ErrorCode::ParseError, "field 'q': expected an array");
                std::vector<double> row;
                for (const auto& v : q) {
                    if (!v.is_number()) fail(ErrorCode::ParseError, "field 'q': expected numbers");
                    row.push_back(v.get<double>());
                }
                if (!out.joints.joint_angles.empty() && row.size() != out.joints.joint_angles.front().size()) {
                    fail(ErrorCode::ParseError, "expected " + std::to_string(out.joints.joint_angles.front().size()) +
                                                    " joint angles, got " + std::to_string(row.size()));
                }
                if (!out.joints.timestamps.empty() && !(t > out.joints.timestamps.back())) {
                    fail(ErrorCode::ParseError, "timestamps must be strictly increasing");
                }
                out.joints.timestamps.push_back(t);
                out.joints.joint_angles.push_back(std::move(row));
                used = true;
            }
            if (j.contains("poses")) {
                for (const auto& [key, value] : j["poses"].items()) {
                    int label = 0;
                    try {
                        label = std::stoi(key);
                    } catch (const std::exception&) {
                        fail(ErrorCode::ParseError, "pose key '" + key + "' is not an integer label");
                    }
                    auto [it, inserted] = track_of_label.emplace(label, out.tracks.size());
                    if (inserted) out.tracks.push_back({label, {}});
                    auto& samples = out.tracks[it->second].samples;
                    if (!samples.empty() && !(t > samples.back().t)) {
                        fail(ErrorCode::ParseError, "timestamps must be strictly increasing");
                    }
                    samples.push_back({t, json_io::pose(value, "poses." + key)});
                }
                used = true;
            }
            if (!used) fail(ErrorCode::ParseError, "record has neither 'q' nor 'poses'");
        } catch (const Error& e) {
            fail(ErrorCode::ParseError, where + ": " + e.what());
        }
    }
    return out;
}

void write_joint_trajectory(const std::filesystem::path& path, const JointTrajectory& trajectory) {
    std::ostringstream os;
    for (std::size_t i = 0; i < trajectory.timestamps.size(); ++i) {
        os << Json{{"t", trajectory.timestamps[i]}, {"q", trajectory.joint_angles[i]}}.dump() << "\n";
    }
    write_text(path, os.str());
}

void write_pose_tracks(const std::filesystem::path& path, const std::vector<InstanceTrack>& tracks) {
    std::map<double, Json> rows;
    for (const auto& track : tracks) {
        for (const auto& s : track.samples) rows[s.t][std::to_string(track.label)] = json_io::to_json(s.pose);
    }
    std::ostringstream os;
    for (const auto& [t, poses] : rows) os << Json{{"t", t}, {"poses", poses}}.dump() << "\n";
    write_text(path, os.str());
}

} // namespace gmp
