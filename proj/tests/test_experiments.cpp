// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "kpplab/experiments.hpp"
#include "kpplab/io.hpp"

using namespace kpplab;

namespace {

bool flag_of(const ExperimentReport& rep, const std::string& name) {
    for (const auto& [k, v] : rep.flags)
        if (k == name) return v;
    FAIL("missing flag ", name);
    return false;
}

bool has_note(const ExperimentReport& rep, const std::string& needle) {
    return std::any_of(rep.notes.begin(), rep.notes.end(), [&](const std::string& n) {
        return n.find(needle) != std::string::npos;
    });
}

bool has_error(const ConfigError& e, const std::string& needle) {
    return std::any_of(e.errors.begin(), e.errors.end(), [&](const std::string& msg) {
        return msg.find(needle) != std::string::npos;
    });
}

}  // namespace

TEST_CASE("config parsing: defaults and coefficient field forms") {
    RunConfig cfg = parse_config(R"({"version": 1})");
    CHECK(cfg.version == 1);
    CHECK(cfg.model.kind == "logistic");
    CHECK(cfg.model.period == 1.0);
    CHECK(cfg.grid.x_min == -20.0);
    CHECK(cfg.grid.x_max == 400.0);
    CHECK(cfg.grid.cells_per_period == 64);
    CHECK(cfg.scheme.dt == 0.0);
    CHECK(cfg.scheme.theta == 1.0);
    CHECK(cfg.scheme.monotone);
    CHECK(cfg.scheme.boundary_left == "neumann_zero");
    CHECK(cfg.init.kind == "bump");
    CHECK(cfg.scenario.t_end == 150.0);
    CHECK(cfg.scenario.t_burn == 50.0);
    CHECK(cfg.scenario.n_pairs == 100);
    CHECK(cfg.out_dir.empty());

    // number, Fourier list, and sampled-cell field forms all build
    RunConfig forms = parse_config(R"({
        "version": 1,
        "model": {"mu_hat": [1.0, 0.5], "kappa": {"samples": [1.0, 1.1, 1.0, 0.9]}}
    })");
    PeriodicField mu = build_field(forms.model.mu_hat, 1.0);
    CHECK(mu(0.0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(mu(0.5) == doctest::Approx(0.5).epsilon(1e-12));
    PeriodicField ka = build_field(forms.model.kappa, 1.0);
    CHECK(ka(0.25) == doctest::Approx(1.1).epsilon(1e-6));
}

TEST_CASE("config parsing: every violation is collected") {
    try {
        parse_config(R"({
            "version": 2,
            "extra": true,
            "grid": {"foo": 1},
            "scheme": {"dt": -0.1},
            "init": {"kind": "blob"}
        })");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.errors.size() >= 5);
        CHECK(has_error(e, "version must be 1"));
        CHECK(has_error(e, "unknown key 'extra'"));
        CHECK(has_error(e, "unknown key 'grid.foo'"));
        CHECK(has_error(e, "scheme.dt must be positive"));
        CHECK(has_error(e, "init.kind must be"));
    }

    // the domain check names the bound the caller must meet
    try {
        parse_config(R"({"version": 1, "scenario": {"t_end": 300}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.errors.size() == 1);
        CHECK(e.errors[0].find("grid.x_max too small") != std::string::npos);
        CHECK(e.errors[0].find("need x_max >= 670") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version": 1, "grid": {"cells_per_period": 16}})"),
                    ConfigError);
}

TEST_CASE("steepness suite: random steeper pairs, deterministic report") {
    RunConfig cfg = parse_config(R"({
        "version": 1,
        "model": {"mu_hat": [1.0, 0.5], "kappa": 1.0},
        "grid": {"x_min": -20, "x_max": 20, "cells_per_period": 32},
        "scenario": {"t_end": 4, "n_pairs": 8, "seed": 7}
    })");
    ExperimentReport rep = steepness_suite(cfg);
    CHECK(rep.id == "steepness");
    CHECK(rep.metric("n_pairs") == 8.0);
    CHECK(rep.metric("n_steep_ok") == 8.0);
    CHECK(flag_of(rep, "all_pairs_steep"));
    CHECK(flag_of(rep, "intersections_monotone"));
    CHECK(rep.pass());

    // identical config, identical bytes
    ExperimentReport again = steepness_suite(cfg);
    CHECK(report_json(rep) == report_json(again));

    // serialized hash matches the canonical config echo
    char expect[32];
    std::snprintf(expect, sizeof expect, "%016llx",
                  static_cast<unsigned long long>(fnv1a_hash(rep.config_echo)));
    CHECK(report_json(rep).find(expect) != std::string::npos);
    CHECK(rep.config_echo == canonical_config(cfg));

    CHECK(rep.has_metric("n_intersection_ok"));
    CHECK_FALSE(rep.has_metric("no_such_metric"));
    CHECK_THROWS_AS(rep.metric("no_such_metric"), std::out_of_range);
}

TEST_CASE("zero initial datum is rejected") {
    RunConfig cfg = parse_config(R"({
        "version": 1,
        "grid": {"x_min": -20, "x_max": 20, "cells_per_period": 32},
        "init": {"kind": "bump", "height": 0.0},
        "scenario": {"t_end": 4}
    })");
    CHECK_THROWS_WITH_AS(theorem2_ctp_spreading(cfg), doctest::Contains("identically zero"),
                         ConfigError);
}

TEST_CASE("periodic profile convergence, and zero perturbation changes nothing") {
    const char* base = R"({
        "version": 1,
        "model": {"kind": "%s", "mu_hat": [1.0, 0.5], "kappa": 1.0%s},
        "grid": {"x_min": -20, "x_max": 280, "cells_per_period": 64},
        "scenario": {"t_end": 100, "t_burn": 40}
    })";
    char buf[512];
    std::snprintf(buf, sizeof buf, base, "logistic", "");
    RunConfig cfg1 = parse_config(buf);
    std::snprintf(buf, sizeof buf, base, "close_to_periodic",
                  ", \"perturbation\": {\"C\": 0.0}");
    RunConfig cfg3 = parse_config(buf);

    ExperimentReport r1 = theorem1_periodic(cfg1);
    CHECK(r1.pass());
    CHECK(flag_of(r1, "distance_final"));
    CHECK(flag_of(r1, "distance_eventually_decreasing"));
    CHECK(flag_of(r1, "shift_sublinear"));
    double p_norm = r1.metric("p_norm");
    CHECK(r1.metric("distance_alpha_final") <= 0.02 * p_norm);
    CHECK(r1.metric("m_over_t") <= 0.05);

    ExperimentReport r3 = theorem3_ctp_profile(cfg3);
    CHECK(r3.pass());
    CHECK(flag_of(r3, "distance_final"));
    CHECK(flag_of(r3, "speed_matches"));
    CHECK(r3.metric("distance_alpha_final") <= 0.03 * p_norm);

    // C = 0 evolves the identical field, so the half-line distances coincide
    CHECK(std::abs(r1.metric("distance_halfline_final") -
                   r3.metric("distance_halfline_final")) <= 1e-12);
    CHECK(r1.metric("c_star") == r3.metric("c_star"));

    // theorem1 refuses a genuinely perturbed model
    RunConfig bad = cfg3;
    bad.model.perturbation_c = 1.0;
    CHECK_THROWS_AS(theorem1_periodic(bad), ConfigError);
}

TEST_CASE("slowly decaying datum is flagged and selects a faster front") {
    RunConfig cfg = parse_config(R"({
        "version": 1,
        "model": {"mu_hat": 1.0, "kappa": 1.0},
        "grid": {"x_min": -20, "x_max": 200, "cells_per_period": 64},
        "init": {"kind": "exp_tail", "decay_rate": 0.5, "amplitude": 1.0},
        "scenario": {"t_end": 60, "t_burn": 20}
    })");
    ExperimentReport rep = theorem1_periodic(cfg);
    CHECK(has_note(rep, "outside hypothesis"));
    CHECK(has_note(rep, "measured speed exceeds c*"));
    CHECK(rep.flags.empty());
    // datum e^{-x/2} rides the decay-rate-0.5 front: speed 0.5 + 1/0.5 = 2.5
    CHECK(rep.metric("speed_measured") > 1.05 * rep.metric("c_star"));
    CHECK(rep.metric("speed_measured") == doctest::Approx(2.5).epsilon(0.02));
}

TEST_CASE("spreading in a close-to-periodic medium") {
    RunConfig cfg = parse_config(R"({
        "version": 1,
        "model": {"kind": "close_to_periodic", "mu_hat": [1.0, 0.5], "kappa": 1.0,
                  "perturbation": {"C": 1.0}},
        "grid": {"x_min": -20, "x_max": 220, "cells_per_period": 64},
        "scenario": {"t_end": 90, "t_burn": 30}
    })");
    ExperimentReport rep = theorem2_ctp_spreading(cfg);
    CHECK(rep.pass());
    CHECK(flag_of(rep, "wake_converged"));
    CHECK(flag_of(rep, "ahead_converged"));
    double p_norm = rep.metric("p_norm");
    CHECK(rep.metric("sup_wake_err_final") <= 0.02 * p_norm);
    CHECK(rep.metric("sup_ahead_final") <= 0.02 * p_norm);
    CHECK(rep.metric("c_star") > 2.0);
}

TEST_CASE("slowly decaying perturbation leaves the hypothesis") {
    RunConfig cfg = parse_config(R"({
        "version": 1,
        "model": {"kind": "close_to_periodic", "mu_hat": [1.0, 0.5], "kappa": 1.0,
                  "perturbation": {"C": 1.0, "rho": 0.5}},
        "grid": {"x_min": -20, "x_max": 220, "cells_per_period": 64},
        "scenario": {"t_end": 30, "t_burn": 10, "alpha_scale": 0.5}
    })");
    ExperimentReport rep = theorem3_ctp_profile(cfg);
    CHECK(has_note(rep, "outside hypothesis"));
    CHECK(rep.flags.empty());
    // alpha(t) = 0.5 c* t still yields a measured distance
    CHECK(rep.has_metric("distance_alpha_final"));
}
