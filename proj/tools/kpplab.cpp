// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "kpplab/config.hpp"
#include "kpplab/diagnostics.hpp"
#include "kpplab/experiments.hpp"
#include "kpplab/floquet.hpp"
#include "kpplab/fronts.hpp"
#include "kpplab/io.hpp"
#include "kpplab/solver.hpp"

namespace fs = std::filesystem;
using namespace kpplab;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot read config file: " + path});
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path resolve_out(const std::string& flag_out, const RunConfig& cfg) {
    if (!flag_out.empty()) return flag_out;
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    if (const char* env = std::getenv("KPP_LAB_OUT")) return env;
    return ".";
}

struct Ctx {
    RunConfig cfg;
    fs::path out;
    std::uint64_t hash = 0;
    bool strict = false;
};

Ctx make_ctx(const std::string& config_path, const std::string& flag_out, bool strict) {
    Ctx ctx;
    ctx.cfg = parse_config(slurp(config_path));
    ctx.out = resolve_out(flag_out, ctx.cfg);
    fs::create_directories(ctx.out);
    ctx.hash = fnv1a_hash(canonical_config(ctx.cfg));
    ctx.strict = strict;
    return ctx;
}

void write_csv_file(const Ctx& ctx, const std::string& name, const std::string& header,
                    const std::vector<std::vector<double>>& rows) {
    write_file((ctx.out / name).string(), file_preamble(ctx.hash, 1) + csv_body(header, rows));
}

std::string json_preamble_fields(const Ctx& ctx) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  \"format_version\": 1,\n  \"config_hash\": \"%016llx\",\n",
                  static_cast<unsigned long long>(ctx.hash));
    return buf;
}

int run_dispersion(const Ctx& ctx) {
    ReactionModel model = build_model([&] {
        ModelSpec spec = ctx.cfg.model;
        if (spec.kind == "close_to_periodic" && spec.perturbation_rho <= 0.0)
            spec.perturbation_rho = 1.0;  // placeholder; only the limit is used below
        return spec;
    }());
    const ReactionModel& lim = model.limiting();
    DispersionData disp = minimal_speed(lim.linearization_field());

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < disp.lambda_grid().size(); ++i)
        rows.push_back({disp.lambda_grid()[i], disp.mu_values()[i], disp.c_values()[i]});
    write_csv_file(ctx, "dispersion.csv", "lambda,mu,c_of_lambda", rows);

    std::vector<double> offsets;
    for (int k = 0; k <= 6; ++k) offsets.push_back(1e-8 * std::pow(10.0, k / 3.0));
    DegeneracyFit deg = degeneracy_exponent(disp, offsets);

    std::ostringstream js;
    js << "{\n" << json_preamble_fields(ctx);
    js << "  \"c_star\": " << g17(disp.c_star()) << ",\n";
    js << "  \"lambda_star\": " << g17(disp.lambda_star()) << ",\n";
    js << "  \"mu_zero\": " << g17(disp.mu_zero()) << ",\n";
    js << "  \"N_fit\": " << g17(deg.n_fit) << ",\n";
    js << "  \"K_fit\": " << g17(deg.k_fit) << ",\n";
    js << "  \"tangency_residual\": " << g17(disp.tangency_residual()) << "\n}\n";
    write_file((ctx.out / "dispersion.json").string(), js.str());
    std::cout << "dispersion: c_star=" << g17(disp.c_star())
              << " lambda_star=" << g17(disp.lambda_star()) << "\n";
    return 0;
}

int run_front(const Ctx& ctx) {
    ReactionModel model = build_model(ctx.cfg.model);
    if (!model.periodic()) throw ConfigError({"front requires a periodic model"});
    const ReactionModel& lim = model.limiting();
    DispersionData disp = minimal_speed(lim.linearization_field());
    Grid grid = make_grid(ctx.cfg.grid.x_min, ctx.cfg.grid.x_max, ctx.cfg.model.period,
                          ctx.cfg.grid.cells_per_period);
    double c = ctx.cfg.scenario.c < 0.0 ? disp.c_star() : ctx.cfg.scenario.c;

    FrontProfile front =
        compute_front(lim, c, disp, grid, ctx.cfg.scenario.front_horizon, FrontOptions{});
    double resid = periodicity_residual(front, lim);

    for (int j = 0; j <= front.n_phase; ++j) {
        std::vector<std::vector<double>> rows;
        double t = front.T * j / front.n_phase - front.t_anchor;
        for (int i = 0; i < grid.n_points; ++i) {
            double z = grid.x(i) - front.k_anchor * front.L;
            rows.push_back({z, front.value(t, z)});
        }
        char name[32];
        std::snprintf(name, sizeof name, "phase_%02d.csv", j);
        write_csv_file(ctx, name, "z,U", rows);
    }
    std::ostringstream js;
    js << "{\n" << json_preamble_fields(ctx);
    js << "  \"c\": " << g17(front.c) << ",\n";
    js << "  \"T\": " << g17(front.T) << ",\n";
    js << "  \"lambda_c\": " << g17(front.lambda_c) << ",\n";
    js << "  \"lambda_fit\": " << g17(front.lambda_fit) << ",\n";
    js << "  \"B_c\": " << g17(front.b_c) << ",\n";
    js << "  \"measured_speed\": " << g17(front.measured_speed) << ",\n";
    js << "  \"periodicity_residual\": " << g17(resid) << "\n}\n";
    write_file((ctx.out / "front.json").string(), js.str());
    std::cout << "front: c=" << g17(front.c) << " periodicity_residual=" << g17(resid) << "\n";
    return 0;
}

int run_simulate(const Ctx& ctx) {
    ReactionModel model = build_model(ctx.cfg.model);
    Grid grid = make_grid(ctx.cfg.grid.x_min, ctx.cfg.grid.x_max, ctx.cfg.model.period,
                          ctx.cfg.grid.cells_per_period);
    StationaryState p = stationary_upper(model, grid, 1e-9);

    SchemeConfig scheme;
    scheme.dt = ctx.cfg.scheme.dt > 0.0 ? ctx.cfg.scheme.dt : 0.25 * grid.dx();
    scheme.theta = ctx.cfg.scheme.theta;
    scheme.monotone_mode = ctx.cfg.scheme.monotone;
    scheme.u_cap = p.sup_norm;
    scheme.boundary_left = ctx.cfg.scheme.boundary_left == "dirichlet_p"
                               ? BoundaryLeft::DirichletP
                               : BoundaryLeft::NeumannZero;
    scheme.left_value = p.values.front();

    SolutionState state;
    state.grid = grid;
    state.t = 0.0;
    if (ctx.cfg.init.kind == "bump")
        state.u = init_bump(grid, ctx.cfg.init.a, ctx.cfg.init.b, ctx.cfg.init.height, scheme);
    else if (ctx.cfg.init.kind == "exp_tail")
        state.u = init_exp_tail(grid, p, ctx.cfg.init.amplitude, ctx.cfg.init.decay_rate);
    else
        state.u = init_heaviside(grid, p, ctx.cfg.init.a);

    const double level = 0.5 * (p.cell ? (*p.cell)(0.0) : p.at(0.0));
    std::vector<std::vector<double>> log_rows;
    std::vector<Probe> probes;
    probes.push_back({ctx.cfg.scenario.snapshot_dt, [&](const SolutionState& s) {
                          std::vector<std::vector<double>> rows;
                          for (int i = 0; i < grid.n_points; ++i)
                              rows.push_back({grid.x(i), s.u[static_cast<std::size_t>(i)]});
                          char name[48];
                          std::snprintf(name, sizeof name, "snap_t%012.6f.csv", s.t);
                          write_csv_file(ctx, name, "x,u", rows);

                          double front_pos = std::numeric_limits<double>::quiet_NaN();
                          try {
                              front_pos = level_crossing(s, level);
                          } catch (const std::runtime_error&) {
                          }
                          double mass = 0.0;
                          for (double v : s.u) mass += v;
                          log_rows.push_back({s.t, front_pos, mass * grid.dx()});
                      },
                      true});
    run(state, model, scheme, ctx.cfg.scenario.t_end, std::move(probes));
    write_csv_file(ctx, "observations.csv", "t,front_pos,mass", log_rows);
    std::cout << "simulate: reached t=" << g17(state.t) << "\n";
    return 0;
}

int run_experiment(const Ctx& ctx, ExperimentReport (*fn)(const RunConfig&)) {
    ExperimentReport rep = fn(ctx.cfg);
    write_file((ctx.out / (rep.id + "_report.json")).string(), report_json(rep));
    for (const Trace& tr : rep.traces)
        write_csv_file(ctx, rep.id + "_" + tr.name + ".csv", tr.header, tr.rows);
    for (const std::string& note : rep.notes) std::cout << rep.id << ": note: " << note << "\n";
    std::cout << rep.id << ": " << (rep.pass() ? "PASS" : "FAIL") << " (wall "
              << g17(rep.wall_time_s) << " s)\n";
    if (ctx.strict && !rep.notes.empty()) {
        std::cerr << rep.id << ": warnings promoted to errors (--strict)\n";
        return 1;
    }
    return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kpplab: numerical laboratory for KPP fronts in periodic media"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 1;
    bool strict = false;
    app.add_option("--config", config_path, "config file (JSON)")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "scenario-level parallelism cap");
    app.add_flag("--strict", strict, "promote warnings to errors");

    auto* sc_dispersion = app.add_subcommand("dispersion", "dispersion curve, c*, lambda*");
    auto* sc_front = app.add_subcommand("front", "pulsating front profile");
    auto* sc_simulate = app.add_subcommand("simulate", "Cauchy problem run");
    auto* sc_t1 = app.add_subcommand("theorem1", "profile convergence, periodic medium");
    auto* sc_t2 = app.add_subcommand("theorem2", "close-to-periodic spreading");
    auto* sc_t3 = app.add_subcommand("theorem3", "close-to-periodic profile convergence");
    auto* sc_steep = app.add_subcommand("steepness", "steepness preservation suite");
    for (auto* sc : {sc_dispersion, sc_front, sc_simulate, sc_t1, sc_t2, sc_t3, sc_steep})
        sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        Ctx ctx = make_ctx(config_path, out_dir, strict);
        (void)threads;
        if (sc_dispersion->parsed()) return run_dispersion(ctx);
        if (sc_front->parsed()) return run_front(ctx);
        if (sc_simulate->parsed()) return run_simulate(ctx);
        if (sc_t1->parsed()) return run_experiment(ctx, &theorem1_periodic);
        if (sc_t2->parsed()) return run_experiment(ctx, &theorem2_ctp_spreading);
        if (sc_t3->parsed()) return run_experiment(ctx, &theorem3_ctp_profile);
        if (sc_steep->parsed()) return run_experiment(ctx, &steepness_suite);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
