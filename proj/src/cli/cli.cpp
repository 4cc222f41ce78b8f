// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/cli.hpp"

#include "gmp/binding.hpp"
#include "gmp/error.hpp"
#include "gmp/estimation.hpp"
#include "gmp/mesh_tools.hpp"
#include "gmp/renderer.hpp"
#include "gmp/scene.hpp"
#include "gmp/urdf.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace gmp::cli {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(' ');
        const auto last = item.find_last_not_of(' ');
        double v = 0.0;
        const char* b = first == std::string::npos ? item.data() : item.data() + first;
        const char* e = last == std::string::npos ? item.data() : item.data() + last + 1;
        const auto res = std::from_chars(b, e, v);
        if (b == e || res.ec != std::errc() || res.ptr != e) {
            fail(ErrorCode::InvalidArgument, flag + ": '" + item + "' is not a number");
        }
        out.push_back(v);
    }
    return out;
}

Vec3 parse_vec3(const std::string& text, const std::string& flag) {
    const auto v = parse_list(text, flag);
    if (v.size() != 3) fail(ErrorCode::InvalidArgument, flag + " expects x,y,z");
    return {v[0], v[1], v[2]};
}

std::string sequence_name(const char* stem, std::size_t i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%06zu", stem, i);
    return buf;
}

std::string frame_name(const char* stem, std::size_t i, const char* ext) {
    return sequence_name(stem, i) + "." + ext;
}

void check_output(const fs::path& input, const fs::path& out) {
    if (out.empty()) fail(ErrorCode::InvalidArgument, "--out is required");
    std::error_code ec;
    if (fs::exists(input) && fs::exists(out) && fs::equivalent(input, out, ec)) {
        fail(ErrorCode::InvalidArgument, "--out must differ from the input bundle");
    }
}

std::string kv(const std::string& key, double value) {
    std::ostringstream os;
    os.precision(10);
    os << key << "=" << value;
    return os.str();
}

struct Options {
    std::string scene;
    std::string out;

    std::string origin = "0,0,0";
    std::string up = "0,1,0";
    std::string forward = "0,0,1";
    double measured = 1.0;
    double asset_length = 1.0;

    std::string q;
    std::string trajectory;
    std::string rest;

    double dt = 1e-3;
    int steps = 1000;
    int sample_every = 10;

    int tile = 16;
    double alpha_cutoff = 1.0 / 255.0;
    std::string background = "0,0,0";
    int sh_degree = kDefaultShDegree;
    std::vector<int> labels;

    std::string candidate;
    std::string reference;
    double tau = kDefaultFscoreTau;
    std::size_t samples = kDefaultSurfaceSamples;
    std::uint64_t seed = kDefaultSamplingSeed;

    std::string observed;
    std::vector<std::string> params;
    int target_label = -1;
    int budget = 200;
    std::uint64_t estimate_seed = 7;
    double lambda = kDefaultOrientationWeight;

    bool clean = false;
    double min_fraction = kDefaultMinComponentFraction;
    int visibility_samples = kDefaultVisibilitySamples;
};

CommandResult cmd_align(const Options& o, std::ostream& out) {
    check_output(o.scene, o.out);
    const SceneAsset in = load_scene(o.scene);
    SceneAsset a = set_origin(in, parse_vec3(o.origin, "--origin"));
    a = reorient_scene(a, parse_vec3(o.up, "--up"), parse_vec3(o.forward, "--forward"));
    a = rescale_scene(a, o.measured, o.asset_length);
    save_scene(a, o.out);
    out << kv("scale", o.measured / o.asset_length) << "\n";
    return {0, {o.out}, "aligned"};
}

CommandResult cmd_bind(const Options& o, std::ostream& out) {
    check_output(o.scene, o.out);
    SceneAsset a = load_scene(o.scene);
    a.binding = build_binding(a.gaussians, a.meshes);
    double max_offset = 0.0;
    for (const auto& r : a.binding->records) max_offset = std::max(max_offset, std::abs(r.normal_offset));
    save_scene(a, o.out);
    out << kv("gaussians", static_cast<double>(a.gaussians.size())) << "\n" << kv("max_normal_offset", max_offset) << "\n";
    return {0, {o.out}, "bound"};
}

CommandResult cmd_pose(const Options& o, std::ostream& out) {
    check_output(o.scene, o.out);
    if (o.q.empty() == o.trajectory.empty()) fail(ErrorCode::InvalidArgument, "give exactly one of --q or --trajectory");
    const SceneAsset a = load_scene(o.scene);
    if (!a.chain) fail(ErrorCode::NoChain, "scene has no kinematic chain");
    const std::vector<double> rest = o.rest.empty() ? std::vector<double>{} : parse_list(o.rest, "--rest");
    if (!o.q.empty()) {
        save_scene(pose_scene(a, parse_list(o.q, "--q"), rest), o.out);
        return {0, {o.out}, "posed"};
    }
    const JointTrajectory traj = read_trajectory_file(o.trajectory).joints;
    if (traj.timestamps.empty()) fail(ErrorCode::ParseError, o.trajectory + ": no joint records");
    traj.validate(a.chain->revolute_count());
    CommandResult result{0, {}, "posed"};
    for (std::size_t i = 0; i < traj.timestamps.size(); ++i) {
        const fs::path dir = fs::path(o.out) / sequence_name("pose", i);
        save_scene(pose_scene(a, traj.joint_angles[i], rest), dir);
        result.artifacts.push_back(dir.string());
    }
    out << kv("frames", static_cast<double>(traj.timestamps.size())) << "\n";
    return result;
}

CommandResult cmd_simulate(const Options& o, std::ostream& out) {
    check_output(o.scene, o.out);
    if (o.steps < 1 || o.sample_every < 1 || !(o.dt > 0.0)) {
        fail(ErrorCode::InvalidArgument, "--steps, --sample-every and --dt must be positive");
    }
    SceneAsset a = load_scene(o.scene);
    if (a.bodies.empty()) fail(ErrorCode::InvalidArgument, "scene has no rigid bodies");
    const SimulationResult sim = simulate(a.bodies, a.wrenches, a.contact, o.dt, o.steps);
    a.pose_tracks.clear();
    for (const auto& track : sim.tracks) {
        InstanceTrack t{track.label, {}};
        for (std::size_t k = 0; k < track.samples.size(); k += static_cast<std::size_t>(o.sample_every)) {
            t.samples.push_back(track.samples[k]);
        }
        a.pose_tracks.push_back(std::move(t));
    }
    save_scene(a, o.out);
    for (const auto& s : sim.final_states) {
        const Vec3& p = s.pose.translation;
        out << "final_position_" << s.label << "=" << p.x() << "," << p.y() << "," << p.z() << "\n";
    }
    return {0, {o.out}, "simulated"};
}

RenderConfig render_config(const Options& o) {
    RenderConfig c;
    c.tile_size = o.tile;
    c.alpha_cutoff = o.alpha_cutoff;
    c.background = parse_vec3(o.background, "--background");
    c.sh_degree = o.sh_degree;
    if (!o.labels.empty()) c.label_filter = std::set<int>(o.labels.begin(), o.labels.end());
    c.validate();
    return c;
}

CommandResult cmd_render(const Options& o, std::ostream& out) {
    check_output(o.scene, o.out);
    const RenderConfig config = render_config(o);
    std::vector<SceneAsset> frames;
    const fs::path input(o.scene);
    if (fs::exists(input / "manifest.json")) {
        const SceneAsset a = load_scene(input);
        std::set<double> times;
        for (const auto& t : a.pose_tracks) {
            for (const auto& s : t.samples) times.insert(s.t);
        }
        if (times.empty()) {
            frames.push_back(a);
        } else {
            for (double t : times) frames.push_back(scene_at_time(a, t));
        }
    } else if (fs::is_directory(input)) {
        std::vector<fs::path> dirs;
        for (const auto& e : fs::directory_iterator(input)) {
            if (e.is_directory() && fs::exists(e.path() / "manifest.json")) dirs.push_back(e.path());
        }
        std::sort(dirs.begin(), dirs.end());
        if (dirs.empty()) fail(ErrorCode::IoError, o.scene + " holds no scene bundles");
        for (const auto& d : dirs) frames.push_back(load_scene(d));
    } else {
        fail(ErrorCode::IoError, "no scene at " + o.scene);
    }
    fs::create_directories(o.out);
    CommandResult result{0, {}, "rendered"};
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const RenderOutput img = render(frames[i].gaussians, frames[i].camera, config);
        const fs::path color = fs::path(o.out) / frame_name("frame", i, "ppm");
        const fs::path labels = fs::path(o.out) / frame_name("instance", i, "pgm");
        write_ppm(color, img);
        write_label_pgm(labels, img);
        result.artifacts.push_back(color.string());
        result.artifacts.push_back(labels.string());
    }
    out << kv("frames", static_cast<double>(frames.size())) << "\n";
    return result;
}

std::vector<Vec3> read_points(const fs::path& path, std::size_t samples, std::uint64_t seed) {
    if (path.extension() == ".obj") return sample_surface(read_obj(path), samples, seed);
    std::ifstream is(path);
    if (!is) fail(ErrorCode::IoError, "cannot read " + path.string());
    std::vector<Vec3> pts;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        std::istringstream ls(line);
        Vec3 p;
        if (!(ls >> p.x() >> p.y() >> p.z())) {
            fail(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected x y z");
        }
        pts.push_back(p);
    }
    return pts;
}

CommandResult cmd_metrics(const Options& o, std::ostream& out) {
    const std::vector<Vec3> cand = read_points(o.candidate, o.samples, o.seed);
    const std::vector<Vec3> ref = read_points(o.reference, o.samples, o.seed);
    const double mse = cloud_mse(cand, ref);
    const FScore f = cloud_fscore(cand, ref, o.tau);
    out << kv("mse", mse) << "\n" << kv("precision", f.precision) << "\n" << kv("recall", f.recall) << "\n"
        << kv("fscore", f.fscore) << "\n" << kv("tau", o.tau) << "\n";
    return {0, {}, "mse=" + std::to_string(mse) + " fscore=" + std::to_string(f.fscore)};
}

ParameterBound parse_param(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 4) fail(ErrorCode::InvalidArgument, "--param expects name:lower:upper:initial, got '" + text + "'");
    ParameterBound b;
    b.name = param_from_string(parts[0]);
    b.lower = parse_list(parts[1], "--param")[0];
    b.upper = parse_list(parts[2], "--param")[0];
    b.initial = parse_list(parts[3], "--param")[0];
    return b;
}

CommandResult cmd_estimate(const Options& o, std::ostream& out) {
    check_output(o.scene, o.out);
    const SceneAsset a = load_scene(o.scene);
    if (o.params.empty()) fail(ErrorCode::InvalidArgument, "at least one --param is required");
    ParameterSpec spec;
    for (const auto& p : o.params) spec.push_back(parse_param(p));
    const auto observed = read_trajectory_file(o.observed).tracks;
    if (observed.empty()) fail(ErrorCode::ParseError, o.observed + ": no pose records");
    std::vector<ObservedTrack> tracks;
    for (const auto& t : observed) tracks.push_back({t.label, t.samples, std::nullopt});
    Scenario scenario{a.bodies, a.wrenches, a.contact, o.dt, o.target_label >= 0 ? o.target_label : tracks.front().label};
    EstimateOptions options;
    options.seed = o.estimate_seed;
    options.lambda = o.lambda;
    const EstimateResult r = estimate_parameters(spec, scenario, tracks, o.budget, options);

    fs::create_directories(o.out);
    const fs::path log_path = fs::path(o.out) / "eval_log.jsonl";
    write_estimation_log(log_path, spec, r);
    Json summary;
    Json unident = Json::array();
    for (ParamName p : r.unidentifiable) unident.push_back(to_string(p));
    for (std::size_t i = 0; i < spec.size(); ++i) summary["params"][to_string(spec[i].name)] = r.best[i];
    summary["loss"] = r.best_loss;
    summary["initial_loss"] = r.initial_loss;
    summary["evaluations"] = r.log.size();
    summary["unidentifiable"] = unident;
    summary["flat_landscape"] = r.flat_landscape;
    const fs::path est_path = fs::path(o.out) / "estimate.json";
    std::ofstream(est_path) << summary.dump(2) << "\n";

    for (std::size_t i = 0; i < spec.size(); ++i) out << kv(to_string(spec[i].name), r.best[i]) << "\n";
    out << kv("loss", r.best_loss) << "\n" << kv("evaluations", static_cast<double>(r.log.size())) << "\n";
    out << "flat_landscape=" << (r.flat_landscape ? "true" : "false") << "\n";
    for (ParamName p : r.unidentifiable) out << "unidentifiable=" << to_string(p) << "\n";
    return {0, {est_path.string(), log_path.string()}, "estimated"};
}

CommandResult cmd_export_urdf(const Options& o, std::ostream& out) {
    check_output(o.scene, o.out);
    SceneAsset a = load_scene(o.scene);
    if (o.clean) {
        for (auto& m : a.meshes) m = clean_mesh(m, o.min_fraction, o.visibility_samples);
    }
    const UrdfModel model = emit_urdf(a, o.out);
    out << kv("links", static_cast<double>(model.links.size())) << "\n"
        << kv("joints", static_cast<double>(model.joints.size())) << "\n";
    return {0, {(fs::path(o.out) / "robot.urdf").string()}, "exported"};
}

void summary_line(std::ostream& out, const std::string& command, const CommandResult& r) {
    Json j{{"command", command},
           {"status", r.exit_code == 0 ? "ok" : "error"},
           {"exit_code", r.exit_code},
           {"artifacts", r.artifacts},
           {"message", r.summary}};
    out << j.dump() << "\n";
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"gmpsim: Gaussian-mesh scene tools for Real2Sim assets"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    const std::string out_help = "output directory (must differ from the input)";

    auto* align = app.add_subcommand("align", "set origin, re-orient to y-up, then rescale a scene bundle");
    align->add_option("scene", o.scene, "input scene bundle")->required();
    align->add_option("--out", o.out, out_help)->required();
    align->add_option("--origin", o.origin, "reference point moved to the origin (x,y,z, m)");
    align->add_option("--up", o.up, "direction mapped to +y (x,y,z)");
    align->add_option("--forward", o.forward, "direction whose part orthogonal to --up maps to +z (x,y,z)");
    align->add_option("--measured", o.measured, "real-world reference length (m)");
    align->add_option("--asset", o.asset_length, "the same length in scene units");

    auto* bind = app.add_subcommand("bind", "bind every Gaussian to the closest face of its instance mesh");
    bind->add_option("scene", o.scene, "input scene bundle")->required();
    bind->add_option("--out", o.out, out_help)->required();

    auto* pose = app.add_subcommand("pose", "pose the kinematic chain and move bound geometry");
    pose->add_option("scene", o.scene, "input scene bundle")->required();
    pose->add_option("--out", o.out, out_help)->required();
    pose->add_option("--q", o.q, "joint angles, comma separated (rad)");
    pose->add_option("--trajectory", o.trajectory, "line-delimited joint trajectory; writes pose_NNNNNN bundles");
    pose->add_option("--rest", o.rest, "joint angles of the captured geometry (rad, default all zero)");

    auto* sim = app.add_subcommand("simulate", "integrate rigid bodies and store their pose tracks");
    sim->add_option("scene", o.scene, "input scene bundle")->required();
    sim->add_option("--out", o.out, out_help)->required();
    sim->add_option("--dt", o.dt, "time step (s)");
    sim->add_option("--steps", o.steps, "number of steps");
    sim->add_option("--sample-every", o.sample_every, "keep every Nth step in the stored tracks");

    auto* rend = app.add_subcommand("render", "render frame_NNNNNN.ppm and instance_NNNNNN.pgm images");
    rend->add_option("scene", o.scene, "scene bundle (one frame per pose-track time) or a directory of bundles")->required();
    rend->add_option("--out", o.out, out_help)->required();
    rend->add_option("--tile", o.tile, "tile size (px)");
    rend->add_option("--alpha-cutoff", o.alpha_cutoff, "skip splats below this opacity");
    rend->add_option("--background", o.background, "background color (r,g,b in [0,1])");
    rend->add_option("--sh-degree", o.sh_degree, "highest SH band evaluated");
    rend->add_option("--label", o.labels, "render only these instance labels (repeatable)");

    auto* met = app.add_subcommand("metrics", "MSE and F-score between a candidate and a reference surface");
    met->add_option("candidate", o.candidate, "candidate .obj mesh or x y z point file")->required();
    met->add_option("reference", o.reference, "reference .obj mesh or x y z point file")->required();
    met->add_option("--tau", o.tau, "F-score distance threshold (m)");
    met->add_option("--samples", o.samples, "surface samples per mesh");
    met->add_option("--seed", o.seed, "sampling seed");

    auto* est = app.add_subcommand("estimate", "fit physics parameters to observed pose tracks");
    est->add_option("scene", o.scene, "scene bundle with bodies, contact and wrenches")->required();
    est->add_option("--observed", o.observed, "line-delimited pose records {t, poses}")->required();
    est->add_option("--out", o.out, out_help)->required();
    est->add_option("--param", o.params, "name:lower:upper:initial; names mass, friction_mu, linear_damping, v0_x, v0_y, v0_z")
        ->required();
    est->add_option("--label", o.target_label, "body receiving mass and v0 (default: first observed label)");
    est->add_option("--budget", o.budget, "loss evaluations");
    est->add_option("--seed", o.estimate_seed, "multi-start seed");
    est->add_option("--dt", o.dt, "simulation time step (s)");
    est->add_option("--lambda", o.lambda, "orientation weight (m^2/rad^2)");

    auto* urdf = app.add_subcommand("export-urdf", "write robot.urdf and link meshes for the scene's chain");
    urdf->add_option("scene", o.scene, "input scene bundle")->required();
    urdf->add_option("--out", o.out, out_help)->required();
    urdf->add_flag("--clean", o.clean, "clean meshes before export");
    urdf->add_option("--min-fraction", o.min_fraction, "cleaning: minimum component size relative to the largest");
    urdf->add_option("--visibility-samples", o.visibility_samples, "cleaning: exterior viewpoints");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    const std::vector<std::pair<CLI::App*, std::function<CommandResult(const Options&, std::ostream&)>>> commands{
        {align, cmd_align}, {bind, cmd_bind},   {pose, cmd_pose},       {sim, cmd_simulate},
        {rend, cmd_render}, {met, cmd_metrics}, {est, cmd_estimate},    {urdf, cmd_export_urdf}};
    for (const auto& [sub, fn] : commands) {
        if (!sub->parsed()) continue;
        const std::string name = sub->get_name();
        CommandResult r;
        try {
            r = fn(o, out);
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            r = {1, {}, e.what()};
        } catch (const std::exception& e) {
            err << "internal error: " << e.what() << "\n";
            r = {2, {}, e.what()};
        }
        summary_line(out, name, r);
        return r.exit_code;
    }
    return 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"gmpsim"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace gmp::cli
