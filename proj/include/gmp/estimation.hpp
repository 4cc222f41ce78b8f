// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gmp/dynamics.hpp"
#include "gmp/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gmp {

enum class ParamName { Mass, FrictionMu, LinearDamping, V0x, V0y, V0z };

std::string to_string(ParamName name);
/// Accepts mass, friction_mu, linear_damping, v0_x, v0_y, v0_z.
ParamName param_from_string(const std::string& name);

struct ParameterBound {
    ParamName name = ParamName::FrictionMu;
    double lower = 0.0;
    double upper = 1.0;
    double initial = 0.5;
};

using ParameterSpec = std::vector<ParameterBound>;

/// Throws InvalidBounds on empty or duplicate specs, lower >= upper or a
/// guess outside its bounds.
void validate(const ParameterSpec& spec);

/// The simulation whose parameters are being fit. Mass and v0 apply to the
/// body carrying target_label; friction and damping to the contact model.
struct Scenario {
    std::vector<RigidState> bodies;
    WrenchSchedule wrenches;
    ContactParams contact;
    double dt = 1e-3;
    int target_label = 0;
};

struct ObservedTrack {
    int label = 0;
    std::vector<TimedPose> samples;
    std::optional<double> noise_floor; // meters

    /// At least 3 samples with strictly increasing timestamps.
    void validate() const;
};

inline constexpr double kDefaultOrientationWeight = 0.1; // m^2 / rad^2

/// Scenario with `params` substituted (mass rescales inertia proportionally).
Scenario apply_parameters(const Scenario& scenario, const ParameterSpec& spec, std::span<const double> params);

/// Mean over samples of |dp|^2 + lambda * angle^2. Simulation failures give
/// +inf and fill `diagnostic`.
double trajectory_loss(std::span<const double> params, const ParameterSpec& spec, const Scenario& scenario,
                       std::span<const ObservedTrack> tracks, double lambda = kDefaultOrientationWeight,
                       std::string* diagnostic = nullptr);

/// Simulates the scenario and samples each body at the given times.
std::vector<ObservedTrack> synthesize_tracks(const Scenario& scenario, std::span<const double> times);

struct EstimateOptions {
    std::uint64_t seed = 7;
    double lambda = kDefaultOrientationWeight;
    int max_starts = 8;
    double bracket_shrink = 0.25;  // per coordinate sweep
    double probe_fraction = 0.1;   // identifiability perturbation
    double flat_threshold = 1e-10; // loss change below which a parameter is unidentifiable
};

struct EvaluationRecord {
    int index = 0;
    std::string phase; // initial, start, sweep, pattern, probe
    std::vector<double> params;
    double loss = 0.0;
};

struct EstimateResult {
    std::vector<double> best;
    double best_loss = 0.0;
    double initial_loss = 0.0;
    std::vector<EvaluationRecord> log;
    std::vector<ParamName> unidentifiable;
    bool flat_landscape = false; // every parameter unidentifiable
};

/// Seeded multi-start followed by coordinate-wise golden-section sweeps with
/// shrinking brackets (each sweep ends with a line search along its net
/// displacement), then +-probe_fraction identifiability probes. Never
/// spends more than `budget` evaluations; budget must be >= 10 per parameter.
EstimateResult estimate_parameters(const ParameterSpec& spec, const Scenario& scenario,
                                   std::span<const ObservedTrack> tracks, int budget,
                                   const EstimateOptions& options = {});

void write_estimation_log(const std::filesystem::path& path, const ParameterSpec& spec, const EstimateResult& result);

} // namespace gmp
