// SPDX-License-Identifier: Apache-2.0
#include "kpplab/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numeric>
#include <sstream>

namespace kpplab {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error([&errs] {
          std::ostringstream os;
          os << "config errors:";
          for (const auto& e : errs) os << "\n  - " << e;
          return os.str();
      }()),
      errors(std::move(errs)) {}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

PeriodicField build_field(const FieldSpec& spec, double period) {
    switch (spec.kind) {
        case FieldSpec::Kind::Constant:
            return PeriodicField::constant(spec.constant, period);
        case FieldSpec::Kind::Fourier:
            return PeriodicField::from_fourier(spec.coeffs, period);
        case FieldSpec::Kind::Samples:
            return PeriodicField(period, spec.coeffs, 3);
    }
    throw std::logic_error("build_field: bad kind");
}

ReactionModel build_model(const ModelSpec& spec) {
    ReactionModel base =
        make_logistic(build_field(spec.mu_hat, spec.period), build_field(spec.kappa, spec.period));
    if (spec.kind == "logistic") return base;
    if (spec.kind == "close_to_periodic") {
        if (!(spec.perturbation_rho > 0.0))
            throw std::invalid_argument("build_model: perturbation rho must be resolved (> 0)");
        return make_close_to_periodic(std::move(base), spec.perturbation_c, spec.perturbation_rho);
    }
    throw std::invalid_argument("build_model: unknown kind '" + spec.kind + "'");
}

namespace {

struct Collector {
    std::vector<std::string> errors;
    void add(const std::string& e) { errors.push_back(e); }
};

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed, Collector& errs) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) errs.add("unknown key '" + (path.empty() ? it.key() : path + "." + it.key()) + "'");
    }
}

FieldSpec parse_field(const json& v, const std::string& path, Collector& errs) {
    FieldSpec out;
    if (v.is_number()) {
        out.kind = FieldSpec::Kind::Constant;
        out.constant = v.get<double>();
        return out;
    }
    if (v.is_array()) {
        out.kind = FieldSpec::Kind::Fourier;
        for (const auto& e : v) {
            if (!e.is_number()) {
                errs.add(path + " entries must be numbers");
                return out;
            }
            out.coeffs.push_back(e.get<double>());
        }
        if (out.coeffs.empty()) errs.add(path + " must not be empty");
        return out;
    }
    if (v.is_object()) {
        check_keys(v, path, {"samples"}, errs);
        if (!v.contains("samples") || !v["samples"].is_array()) {
            errs.add(path + ".samples must be an array");
            return out;
        }
        out.kind = FieldSpec::Kind::Samples;
        for (const auto& e : v["samples"]) {
            if (!e.is_number()) {
                errs.add(path + ".samples entries must be numbers");
                return out;
            }
            out.coeffs.push_back(e.get<double>());
        }
        if (out.coeffs.size() < 4) errs.add(path + ".samples needs at least 4 values");
        return out;
    }
    errs.add(path + " must be a number, Fourier list, or {samples: [...]}");
    return out;
}

double get_num(const json& obj, const char* key, double fallback, const std::string& path,
               Collector& errs) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        errs.add(path + "." + key + " must be a number");
        return fallback;
    }
    return obj[key].get<double>();
}

// mean linear growth rate on one cell, for the domain-size estimate
double mean_growth(const ModelSpec& spec) {
    try {
        PeriodicField mu = build_field(spec.mu_hat, spec.period);
        PeriodicField ka = build_field(spec.kappa, spec.period);
        double s = 0.0;
        const int n = 257;
        for (int i = 0; i < n; ++i) {
            double x = spec.period * i / n;
            s += mu(x) * ka(x);
        }
        return s / n;
    } catch (const std::exception&) {
        return 0.0;
    }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    Collector errs;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }
    if (!root.is_object()) throw ConfigError({"top level must be an object"});

    RunConfig cfg;
    check_keys(root, "", {"version", "model", "grid", "scheme", "init", "scenario", "out_dir"},
               errs);

    if (root.contains("version")) {
        if (!root["version"].is_number_integer() || root["version"].get<int>() != 1)
            errs.add("version must be 1");
        else
            cfg.version = 1;
    } else {
        errs.add("version is required");
    }

    if (root.contains("model")) {
        const json& m = root["model"];
        if (!m.is_object()) {
            errs.add("model must be an object");
        } else {
            check_keys(m, "model", {"kind", "period", "mu_hat", "kappa", "perturbation"}, errs);
            if (m.contains("kind")) {
                if (!m["kind"].is_string())
                    errs.add("model.kind must be a string");
                else
                    cfg.model.kind = m["kind"].get<std::string>();
            }
            if (cfg.model.kind != "logistic" && cfg.model.kind != "close_to_periodic")
                errs.add("model.kind must be 'logistic' or 'close_to_periodic'");
            cfg.model.period = get_num(m, "period", 1.0, "model", errs);
            if (!(cfg.model.period > 0.0)) errs.add("model.period must be positive");
            if (m.contains("mu_hat")) cfg.model.mu_hat = parse_field(m["mu_hat"], "model.mu_hat", errs);
            if (m.contains("kappa")) cfg.model.kappa = parse_field(m["kappa"], "model.kappa", errs);
            if (m.contains("perturbation")) {
                const json& p = m["perturbation"];
                if (!p.is_object()) {
                    errs.add("model.perturbation must be an object");
                } else {
                    check_keys(p, "model.perturbation", {"C", "rho"}, errs);
                    cfg.model.perturbation_c = get_num(p, "C", 0.0, "model.perturbation", errs);
                    cfg.model.perturbation_rho = get_num(p, "rho", 0.0, "model.perturbation", errs);
                    if (cfg.model.perturbation_c < 0.0) errs.add("model.perturbation.C must be >= 0");
                    if (cfg.model.perturbation_rho < 0.0)
                        errs.add("model.perturbation.rho must be >= 0 (0 selects 2 lambda*)");
                }
            }
        }
    }

    if (root.contains("grid")) {
        const json& g = root["grid"];
        if (!g.is_object()) {
            errs.add("grid must be an object");
        } else {
            check_keys(g, "grid", {"x_min", "x_max", "cells_per_period"}, errs);
            cfg.grid.x_min = get_num(g, "x_min", cfg.grid.x_min, "grid", errs);
            cfg.grid.x_max = get_num(g, "x_max", cfg.grid.x_max, "grid", errs);
            cfg.grid.cells_per_period =
                static_cast<int>(get_num(g, "cells_per_period", cfg.grid.cells_per_period, "grid", errs));
        }
    }
    if (!(cfg.grid.x_max > cfg.grid.x_min)) errs.add("grid.x_max must exceed grid.x_min");
    if (cfg.grid.cells_per_period < 32) errs.add("grid.cells_per_period must be >= 32");
    if (cfg.model.period > 0.0 && cfg.grid.x_max - cfg.grid.x_min < 20.0 * cfg.model.period)
        errs.add("grid span must cover at least 20 periods");

    if (root.contains("scheme")) {
        const json& s = root["scheme"];
        if (!s.is_object()) {
            errs.add("scheme must be an object");
        } else {
            check_keys(s, "scheme", {"dt", "theta", "monotone", "boundary_left"}, errs);
            cfg.scheme.dt = get_num(s, "dt", 0.0, "scheme", errs);
            if (s.contains("dt") && !(cfg.scheme.dt > 0.0)) errs.add("scheme.dt must be positive");
            cfg.scheme.theta = get_num(s, "theta", 1.0, "scheme", errs);
            if (cfg.scheme.theta < 0.0 || cfg.scheme.theta > 1.0)
                errs.add("scheme.theta must lie in [0, 1]");
            if (s.contains("monotone")) {
                if (!s["monotone"].is_boolean())
                    errs.add("scheme.monotone must be a boolean");
                else
                    cfg.scheme.monotone = s["monotone"].get<bool>();
            }
            if (s.contains("boundary_left")) {
                if (!s["boundary_left"].is_string())
                    errs.add("scheme.boundary_left must be a string");
                else
                    cfg.scheme.boundary_left = s["boundary_left"].get<std::string>();
            }
            if (cfg.scheme.boundary_left != "neumann_zero" &&
                cfg.scheme.boundary_left != "dirichlet_p")
                errs.add("scheme.boundary_left must be 'neumann_zero' or 'dirichlet_p'");
        }
    }

    if (root.contains("init")) {
        const json& i = root["init"];
        if (!i.is_object()) {
            errs.add("init must be an object");
        } else {
            check_keys(i, "init", {"kind", "a", "b", "height", "amplitude", "decay_rate"}, errs);
            if (i.contains("kind")) {
                if (!i["kind"].is_string())
                    errs.add("init.kind must be a string");
                else
                    cfg.init.kind = i["kind"].get<std::string>();
            }
            if (cfg.init.kind != "bump" && cfg.init.kind != "exp_tail" && cfg.init.kind != "heaviside")
                errs.add("init.kind must be 'bump', 'exp_tail', or 'heaviside'");
            cfg.init.a = get_num(i, "a", cfg.init.a, "init", errs);
            cfg.init.b = get_num(i, "b", cfg.init.b, "init", errs);
            cfg.init.height = get_num(i, "height", cfg.init.height, "init", errs);
            cfg.init.amplitude = get_num(i, "amplitude", cfg.init.amplitude, "init", errs);
            cfg.init.decay_rate = get_num(i, "decay_rate", cfg.init.decay_rate, "init", errs);
            if (cfg.init.kind == "exp_tail" && !(cfg.init.decay_rate > 0.0))
                errs.add("init.decay_rate must be positive");
        }
    }

    if (root.contains("scenario")) {
        const json& s = root["scenario"];
        if (!s.is_object()) {
            errs.add("scenario must be an object");
        } else {
            check_keys(s, "scenario",
                       {"t_end", "t_burn", "snapshot_dt", "c", "front_horizon", "n_pairs", "seed",
                        "alpha_scale"},
                       errs);
            cfg.scenario.t_end = get_num(s, "t_end", cfg.scenario.t_end, "scenario", errs);
            cfg.scenario.t_burn = get_num(s, "t_burn", cfg.scenario.t_burn, "scenario", errs);
            cfg.scenario.snapshot_dt = get_num(s, "snapshot_dt", cfg.scenario.snapshot_dt, "scenario", errs);
            cfg.scenario.c = get_num(s, "c", cfg.scenario.c, "scenario", errs);
            cfg.scenario.front_horizon =
                get_num(s, "front_horizon", cfg.scenario.front_horizon, "scenario", errs);
            cfg.scenario.n_pairs =
                static_cast<int>(get_num(s, "n_pairs", cfg.scenario.n_pairs, "scenario", errs));
            cfg.scenario.seed = static_cast<std::uint64_t>(
                get_num(s, "seed", static_cast<double>(cfg.scenario.seed), "scenario", errs));
            cfg.scenario.alpha_scale = get_num(s, "alpha_scale", 0.0, "scenario", errs);
            if (!(cfg.scenario.t_end > 0.0)) errs.add("scenario.t_end must be positive");
            if (cfg.scenario.t_burn < 0.0) errs.add("scenario.t_burn must be >= 0");
            if (cfg.scenario.n_pairs < 1) errs.add("scenario.n_pairs must be >= 1");
        }
    }

    if (root.contains("out_dir")) {
        if (!root["out_dir"].is_string())
            errs.add("out_dir must be a string");
        else
            cfg.out_dir = root["out_dir"].get<std::string>();
    }

    // domain-versus-horizon sanity: the front travels at roughly 2 sqrt(mean r)
    if (errs.errors.empty()) {
        double rbar = mean_growth(cfg.model);
        if (rbar > 0.0) {
            double c_est = 2.0 * std::sqrt(rbar);
            double required = 1.1 * c_est * cfg.scenario.t_end + 10.0 * cfg.model.period;
            if (cfg.grid.x_max < required) {
                std::ostringstream os;
                os << "grid.x_max too small for scenario.t_end: need x_max >= " << required;
                errs.add(os.str());
            }
        }
    }

    if (!errs.errors.empty()) throw ConfigError(std::move(errs.errors));
    return cfg;
}

namespace {

ordered_json field_json(const FieldSpec& f) {
    switch (f.kind) {
        case FieldSpec::Kind::Constant:
            return f.constant;
        case FieldSpec::Kind::Fourier:
            return f.coeffs;
        case FieldSpec::Kind::Samples:
            return ordered_json{{"samples", f.coeffs}};
    }
    return nullptr;
}

}  // namespace

std::string canonical_config(const RunConfig& cfg) {
    ordered_json j;
    j["version"] = cfg.version;
    j["model"] = {{"kind", cfg.model.kind},
                  {"period", cfg.model.period},
                  {"mu_hat", field_json(cfg.model.mu_hat)},
                  {"kappa", field_json(cfg.model.kappa)},
                  {"perturbation",
                   {{"C", cfg.model.perturbation_c}, {"rho", cfg.model.perturbation_rho}}}};
    j["grid"] = {{"x_min", cfg.grid.x_min},
                 {"x_max", cfg.grid.x_max},
                 {"cells_per_period", cfg.grid.cells_per_period}};
    j["scheme"] = {{"dt", cfg.scheme.dt},
                   {"theta", cfg.scheme.theta},
                   {"monotone", cfg.scheme.monotone},
                   {"boundary_left", cfg.scheme.boundary_left}};
    j["init"] = {{"kind", cfg.init.kind},       {"a", cfg.init.a},
                 {"b", cfg.init.b},             {"height", cfg.init.height},
                 {"amplitude", cfg.init.amplitude}, {"decay_rate", cfg.init.decay_rate}};
    j["scenario"] = {{"t_end", cfg.scenario.t_end},
                     {"t_burn", cfg.scenario.t_burn},
                     {"snapshot_dt", cfg.scenario.snapshot_dt},
                     {"c", cfg.scenario.c},
                     {"front_horizon", cfg.scenario.front_horizon},
                     {"n_pairs", cfg.scenario.n_pairs},
                     {"seed", cfg.scenario.seed},
                     {"alpha_scale", cfg.scenario.alpha_scale}};
    j["out_dir"] = cfg.out_dir;
    return j.dump(2);
}

}  // namespace kpplab
