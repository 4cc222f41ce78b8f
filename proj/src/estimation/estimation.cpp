// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/estimation.hpp"

#include "gmp/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>

namespace gmp {

std::string to_string(ParamName name) {
    switch (name) {
    case ParamName::Mass: return "mass";
    case ParamName::FrictionMu: return "friction_mu";
    case ParamName::LinearDamping: return "linear_damping";
    case ParamName::V0x: return "v0_x";
    case ParamName::V0y: return "v0_y";
    case ParamName::V0z: return "v0_z";
    }
    return "unknown";
}

ParamName param_from_string(const std::string& name) {
    for (ParamName p : {ParamName::Mass, ParamName::FrictionMu, ParamName::LinearDamping, ParamName::V0x,
                        ParamName::V0y, ParamName::V0z}) {
        if (to_string(p) == name) return p;
    }
    fail(ErrorCode::InvalidArgument, "unknown parameter '" + name + "'");
}

void validate(const ParameterSpec& spec) {
    if (spec.empty()) fail(ErrorCode::InvalidBounds, "no parameters to estimate");
    std::set<ParamName> seen;
    for (const auto& b : spec) {
        const std::string n = to_string(b.name);
        if (!seen.insert(b.name).second) fail(ErrorCode::InvalidBounds, "parameter " + n + " listed twice");
        if (!std::isfinite(b.lower) || !std::isfinite(b.upper) || !(b.lower < b.upper)) {
            fail(ErrorCode::InvalidBounds, "parameter " + n + " needs finite lower < upper");
        }
        if (!(b.initial >= b.lower && b.initial <= b.upper)) {
            fail(ErrorCode::InvalidBounds, "initial guess for " + n + " lies outside its bounds");
        }
        if (b.name == ParamName::Mass && !(b.lower > 0.0)) fail(ErrorCode::InvalidBounds, "mass bounds must be positive");
        if ((b.name == ParamName::FrictionMu || b.name == ParamName::LinearDamping) && b.lower < 0.0) {
            fail(ErrorCode::InvalidBounds, "parameter " + n + " must be non-negative");
        }
    }
}

void ObservedTrack::validate() const {
    if (samples.size() < 3) fail(ErrorCode::InvalidArgument, "observed track needs at least 3 samples");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].t > samples[i - 1].t)) {
            fail(ErrorCode::InvalidArgument, "observed timestamps must be strictly increasing");
        }
    }
}

Scenario apply_parameters(const Scenario& scenario, const ParameterSpec& spec, std::span<const double> params) {
    if (params.size() != spec.size()) fail(ErrorCode::ArityMismatch, "parameter vector does not match the spec");
    Scenario out = scenario;
    auto body = std::find_if(out.bodies.begin(), out.bodies.end(),
                             [&](const RigidState& b) { return b.label == scenario.target_label; });
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double v = params[i];
        const ParamName name = spec[i].name;
        if (name == ParamName::FrictionMu) {
            out.contact.friction_mu = v;
            continue;
        }
        if (name == ParamName::LinearDamping) {
            out.contact.linear_damping = v;
            continue;
        }
        if (body == out.bodies.end()) {
            fail(ErrorCode::InvalidArgument, "no body carries target label " + std::to_string(scenario.target_label));
        }
        switch (name) {
        case ParamName::Mass:
            body->inertia *= v / body->mass;
            body->mass = v;
            break;
        case ParamName::V0x: body->linear_velocity.x() = v; break;
        case ParamName::V0y: body->linear_velocity.y() = v; break;
        case ParamName::V0z: body->linear_velocity.z() = v; break;
        default: break;
        }
    }
    return out;
}

namespace {

int steps_to_cover(double t_end, double dt) {
    return std::max(1, static_cast<int>(std::ceil(t_end / dt - 1e-9)));
}

/// Pose of a fixed-step track at time t (linear position, geodesic rotation).
Pose pose_at(const InstanceTrack& track, double t, double dt) {
    const double u = t / dt;
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(u)));
    if (k + 1 >= track.samples.size()) return track.samples.back().pose;
    double frac = u - static_cast<double>(k);
    if (frac > 1.0 - 1e-9) {
        ++k;
        frac = 0.0;
    }
    const Pose& a = track.samples[k].pose;
    if (frac < 1e-9) return a;
    const Pose& b = track.samples[k + 1].pose;
    Pose p;
    p.translation = (1.0 - frac) * a.translation + frac * b.translation;
    p.rotation = a.rotation * exp_so3(frac * log_so3(a.rotation.transpose() * b.rotation));
    return p;
}

SimulationResult run(const Scenario& s, double t_end) {
    return simulate(s.bodies, s.wrenches, s.contact, s.dt, steps_to_cover(t_end, s.dt));
}

} // namespace

std::vector<ObservedTrack> synthesize_tracks(const Scenario& scenario, std::span<const double> times) {
    if (times.empty()) fail(ErrorCode::InvalidArgument, "no sample times");
    const SimulationResult sim = run(scenario, times.back());
    std::vector<ObservedTrack> out;
    for (const auto& track : sim.tracks) {
        ObservedTrack obs;
        obs.label = track.label;
        for (double t : times) obs.samples.push_back({t, pose_at(track, t, scenario.dt)});
        out.push_back(std::move(obs));
    }
    return out;
}

double trajectory_loss(std::span<const double> params, const ParameterSpec& spec, const Scenario& scenario,
                       std::span<const ObservedTrack> tracks, double lambda, std::string* diagnostic) {
    if (tracks.empty()) fail(ErrorCode::InvalidArgument, "no observed tracks");
    double t_end = 0.0;
    for (const auto& track : tracks) {
        track.validate();
        t_end = std::max(t_end, track.samples.back().t);
    }
    const auto reject = [&](const std::string& why) {
        if (diagnostic) *diagnostic = why;
        return std::numeric_limits<double>::infinity();
    };
    SimulationResult sim;
    try {
        sim = run(apply_parameters(scenario, spec, params), t_end);
    } catch (const Error& e) {
        return reject(e.what());
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& obs : tracks) {
        const auto it = std::find_if(sim.tracks.begin(), sim.tracks.end(),
                                     [&](const InstanceTrack& t) { return t.label == obs.label; });
        if (it == sim.tracks.end()) return reject("no simulated body for label " + std::to_string(obs.label));
        for (const auto& s : obs.samples) {
            const Pose p = pose_at(*it, s.t, scenario.dt);
            const double angle = rotation_distance(p.rotation, s.pose.rotation);
            sum += (p.translation - s.pose.translation).squaredNorm() + lambda * angle * angle;
            ++count;
        }
    }
    const double loss = sum / static_cast<double>(count);
    if (!std::isfinite(loss)) return reject("simulation diverged");
    if (diagnostic) diagnostic->clear();
    return loss;
}

namespace {

class Search {
public:
    Search(const ParameterSpec& spec, const Scenario& scenario, std::span<const ObservedTrack> tracks, int budget,
           const EstimateOptions& options, EstimateResult& result)
        : spec_(spec), scenario_(scenario), tracks_(tracks), budget_(budget), options_(options), result_(result) {}

    int remaining() const { return budget_ - static_cast<int>(result_.log.size()); }

    double eval(const std::vector<double>& x, const std::string& phase) {
        const double loss = trajectory_loss(x, spec_, scenario_, tracks_, options_.lambda);
        result_.log.push_back({static_cast<int>(result_.log.size()), phase, x, loss});
        if (loss < result_.best_loss) {
            result_.best_loss = loss;
            result_.best = x;
        }
        return loss;
    }

    /// Golden-section over origin + s dir for s in [lo, hi] using at most n evaluations.
    void line(const std::vector<double>& origin, const std::vector<double>& dir, double lo, double hi, int n,
              const std::string& phase) {
        if (n < 2 || !(hi > lo)) return;
        constexpr double kInvPhi = 0.6180339887498949;
        auto at = [&](double step) {
            std::vector<double> x = origin;
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] = std::clamp(origin[i] + step * dir[i], spec_[i].lower, spec_[i].upper);
            }
            return eval(x, phase);
        };
        double a = lo;
        double b = hi;
        double c = b - kInvPhi * (b - a);
        double d = a + kInvPhi * (b - a);
        double fc = at(c);
        double fd = at(d);
        for (int k = 2; k < n; ++k) {
            if (fc <= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - kInvPhi * (b - a);
                fc = at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + kInvPhi * (b - a);
                fd = at(d);
            }
        }
    }

    /// Golden-section on coordinate i over [lo, hi] around the current best.
    void coordinate(std::size_t i, double lo, double hi, int n) {
        const std::vector<double> origin = result_.best;
        std::vector<double> dir(origin.size(), 0.0);
        dir[i] = 1.0;
        line(origin, dir, lo - origin[i], hi - origin[i], n, "sweep");
    }

private:
    const ParameterSpec& spec_;
    const Scenario& scenario_;
    std::span<const ObservedTrack> tracks_;
    int budget_;
    const EstimateOptions& options_;
    EstimateResult& result_;
};

} // namespace

EstimateResult estimate_parameters(const ParameterSpec& spec, const Scenario& scenario,
                                   std::span<const ObservedTrack> tracks, int budget,
                                   const EstimateOptions& options) {
    validate(spec);
    const auto n = static_cast<int>(spec.size());
    if (budget < 10 * n) {
        fail(ErrorCode::InvalidArgument, "budget " + std::to_string(budget) + " is below 10 evaluations per parameter");
    }
    for (const auto& t : tracks) t.validate();

    EstimateResult result;
    result.best_loss = std::numeric_limits<double>::infinity();
    Search search(spec, scenario, tracks, budget, options, result);

    std::vector<double> x0;
    for (const auto& b : spec) x0.push_back(b.initial);
    result.initial_loss = search.eval(x0, "initial");
    if (result.best.empty()) result.best = x0;

    const int probes = 2 * n;
    const int starts = std::clamp(budget / (25 * n), 1, options.max_starts);
    std::mt19937_64 rng(options.seed);
    for (int s = 0; s < starts && search.remaining() > probes; ++s) {
        std::vector<double> x;
        for (const auto& b : spec) x.push_back(std::uniform_real_distribution<double>(b.lower, b.upper)(rng));
        search.eval(x, "start");
    }

    std::vector<double> width;
    // Twice the range, so the first sweep spans the full bounds wherever the best point lies.
    for (const auto& b : spec) width.push_back(2.0 * (b.upper - b.lower));
    const int sweep_budget = search.remaining() - probes;
    const int per_line = std::clamp(sweep_budget / (10 * n), 4, 10);
    // Largest steps s >= 0 and s <= 0 keeping origin + s dir inside the bounds.
    auto reach = [&](const std::vector<double>& origin, const std::vector<double>& dir, double cap) {
        double up = cap;
        double down = cap;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            if (dir[i] > 0.0) {
                up = std::min(up, (spec[i].upper - origin[i]) / dir[i]);
                down = std::min(down, (origin[i] - spec[i].lower) / dir[i]);
            } else if (dir[i] < 0.0) {
                up = std::min(up, (spec[i].lower - origin[i]) / dir[i]);
                down = std::min(down, (origin[i] - spec[i].upper) / dir[i]);
            }
        }
        return std::pair{down, up};
    };
    std::vector<double> previous_pattern;
    while (search.remaining() - probes >= 2) {
        const std::vector<double> before = result.best;
        for (std::size_t i = 0; i < spec.size() && search.remaining() - probes >= 2; ++i) {
            const double c = result.best[i];
            const double lo = std::max(spec[i].lower, c - 0.5 * width[i]);
            const double hi = std::min(spec[i].upper, c + 0.5 * width[i]);
            search.coordinate(i, lo, hi, std::min(per_line, search.remaining() - probes));
        }
        // Along the previous sweep's pattern direction, then along this one's.
        if (!previous_pattern.empty() && search.remaining() - probes >= 2) {
            const std::vector<double> origin = result.best;
            const auto [down, up] = reach(origin, previous_pattern, 2.0);
            search.line(origin, previous_pattern, -down, up, std::min(per_line, search.remaining() - probes), "pattern");
        }
        std::vector<double> dir(spec.size());
        for (std::size_t i = 0; i < spec.size(); ++i) dir[i] = result.best[i] - before[i];
        const auto moved_coords = std::count_if(dir.begin(), dir.end(), [](double v) { return v != 0.0; });
        if (moved_coords > 1) {
            const double up = reach(before, dir, 8.0).second;
            if (up > 1.0 && search.remaining() - probes >= 2) {
                search.line(before, dir, 0.0, up, std::min(per_line, search.remaining() - probes), "pattern");
            }
            previous_pattern = dir;
        }
        // Shrink, but keep room for a coordinate still travelling along a valley.
        for (std::size_t i = 0; i < spec.size(); ++i) {
            const double moved = std::abs(result.best[i] - before[i]);
            width[i] = std::min(2.0 * (spec[i].upper - spec[i].lower),
                                std::max(options.bracket_shrink * width[i], 3.0 * moved));
        }
        if (*std::max_element(width.begin(), width.end()) < 1e-12) break;
    }

    const std::vector<double> best = result.best;
    const double best_loss = result.best_loss;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double step = best[i] != 0.0 ? options.probe_fraction * std::abs(best[i])
                                           : options.probe_fraction * (spec[i].upper - spec[i].lower);
        double change = 0.0;
        for (double sign : {-1.0, 1.0}) {
            std::vector<double> x = best;
            x[i] = std::clamp(best[i] + sign * step, spec[i].lower, spec[i].upper);
            const double loss = search.eval(x, "probe");
            change = std::max(change, std::abs(loss - best_loss));
        }
        if (change < options.flat_threshold) result.unidentifiable.push_back(spec[i].name);
    }
    result.flat_landscape = result.unidentifiable.size() == spec.size();
    return result;
}

void write_estimation_log(const std::filesystem::path& path, const ParameterSpec& spec, const EstimateResult& result) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorCode::IoError, "cannot write " + path.string());
    for (const auto& r : result.log) {
        nlohmann::json params = nlohmann::json::object();
        for (std::size_t i = 0; i < spec.size(); ++i) params[to_string(spec[i].name)] = r.params[i];
        nlohmann::json line{{"eval", r.index}, {"phase", r.phase}, {"params", params}};
        if (std::isfinite(r.loss)) {
            line["loss"] = r.loss;
        } else {
            line["loss"] = nullptr;
        }
        os << line.dump() << "\n";
    }
}

} // namespace gmp
