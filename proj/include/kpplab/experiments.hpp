// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kpplab/config.hpp"
#include "kpplab/diagnostics.hpp"
#include "kpplab/fronts.hpp"

namespace kpplab {

/// Named numeric table emitted as one CSV file per trace.
struct Trace {
    std::string name;
    std::string header;  // comma-separated column names
    std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
    std::string id;
    std::string config_echo;
    std::vector<std::pair<std::string, double>> metrics;  // insertion-ordered
    std::vector<std::pair<std::string, bool>> flags;      // asserted criteria
    std::vector<std::string> notes;                       // e.g. "outside hypothesis"
    std::vector<Trace> traces;
    double wall_time_s = 0.0;  // reported to the console, never serialized

    bool pass() const;
    double metric(const std::string& name) const;  // throws when absent
    bool has_metric(const std::string& name) const;
};

/// Cauchy run with fast-decaying datum against the minimal-speed pulsating
/// front: shifted sup-distance on half-lines plus the lag m(t).
ExperimentReport theorem1_periodic(const RunConfig& cfg);

/// Close-to-periodic spreading: u -> p behind 0.9 c* t, u -> 0 ahead of
/// 1.1 c* t.
ExperimentReport theorem2_ctp_spreading(const RunConfig& cfg);

/// Close-to-periodic profile convergence on [alpha(t), +inf) against the
/// front of the limiting periodic problem.
ExperimentReport theorem3_ctp_profile(const RunConfig& cfg);

/// Random steeper pairs evolved together: steepness order and intersection
/// counts at every checkpoint.
ExperimentReport steepness_suite(const RunConfig& cfg);

/// Deterministic serialization (config hash, metrics, flags, notes); byte
/// stable across repeated runs of the same config.
std::string report_json(const ExperimentReport& report);

}  // namespace kpplab
