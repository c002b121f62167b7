// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpplab/reaction.hpp"

namespace kpplab {

/// Declarative model description; coefficient fields given as a constant, a
/// Fourier coefficient list {a0, a1, b1, ...}, or one cell of samples.
struct FieldSpec {
    enum class Kind { Constant, Fourier, Samples } kind = Kind::Constant;
    double constant = 1.0;
    std::vector<double> coeffs;
};

struct ModelSpec {
    std::string kind = "logistic";  // "logistic" | "close_to_periodic"
    double period = 1.0;
    FieldSpec mu_hat;
    FieldSpec kappa;
    double perturbation_c = 0.0;    // close_to_periodic only
    double perturbation_rho = 0.0;  // 0 = pick 2 lambda* at build time
};

struct GridSpec {
    double x_min = -20.0;
    double x_max = 400.0;
    int cells_per_period = 64;
};

struct SchemeSpec {
    double dt = 0.0;  // 0 = 0.25 dx
    double theta = 1.0;
    bool monotone = true;
    std::string boundary_left = "neumann_zero";  // or "dirichlet_p"
};

struct InitSpec {
    std::string kind = "bump";  // "bump" | "exp_tail" | "heaviside"
    double a = 0.0;
    double b = 1.0;
    double height = 1.0;
    double amplitude = 1.0;
    double decay_rate = 1.0;  // exp_tail only
};

struct ScenarioSpec {
    double t_end = 150.0;
    double t_burn = 50.0;
    double snapshot_dt = 1.0;
    double c = -1.0;           // front subcommand; < 0 means c*
    double front_horizon = 400.0;
    int n_pairs = 100;         // steepness suite
    std::uint64_t seed = 20240701;
    double alpha_scale = 0.0;  // theorem3: alpha(t) = sqrt(t) when 0, else scale*t
};

struct RunConfig {
    int version = 1;
    ModelSpec model;
    GridSpec grid;
    SchemeSpec scheme;
    InitSpec init;
    ScenarioSpec scenario;
    std::string out_dir;
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> errs);
    std::vector<std::string> errors;
};

/// Parses and validates a JSON config; throws ConfigError carrying every
/// schema violation found, not just the first.
RunConfig parse_config(const std::string& text);

/// Deterministic serialization of the validated config (the echo embedded in
/// every output and report).
std::string canonical_config(const RunConfig& cfg);

std::uint64_t fnv1a_hash(const std::string& text);

PeriodicField build_field(const FieldSpec& spec, double period);
ReactionModel build_model(const ModelSpec& spec);

}  // namespace kpplab
