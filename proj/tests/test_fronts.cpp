// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kpplab/diagnostics.hpp"
#include "kpplab/floquet.hpp"
#include "kpplab/fronts.hpp"

using namespace kpplab;

namespace {

ReactionModel homog_model() {
    return make_logistic(PeriodicField::constant(1.0, 1.0), PeriodicField::constant(1.0, 1.0));
}

ReactionModel cosine_model() {
    return make_logistic(PeriodicField::from_fourier({1.0, 0.5}, 1.0),
                         PeriodicField::constant(1.0, 1.0));
}

Grid front_grid() { return make_grid(-20.0, 420.0, 1.0, 64); }

// frame speed measured by re-evolving phase 0 and fitting level crossings
double reevolved_speed(const FrontProfile& pr, const ReactionModel& model, int n_periods) {
    const Grid& grid = pr.grid;
    const double dtau = pr.T / pr.n_phase;
    const auto substeps = std::max(1L, std::lround(dtau / (0.25 * grid.dx())));
    SchemeConfig scheme;
    scheme.dt = dtau / static_cast<double>(substeps);
    scheme.u_cap = pr.p_norm;
    scheme.boundary_left = BoundaryLeft::DirichletP;
    scheme.left_value = pr.p.values.front();
    SolutionState s;
    s.grid = grid;
    s.t = 0.0;
    s.u = pr.phases[0];
    Stepper st(grid, model, scheme);
    const double level = 0.5 * (pr.p.cell ? (*pr.p.cell)(0.0) : pr.p.at(0.0));
    CrossingSeries series;
    series.theta = level;
    series.times.push_back(0.0);
    series.positions.push_back(level_crossing(s, level));
    for (int k = 1; k <= n_periods * pr.n_phase; ++k) {
        for (long q = 0; q < substeps; ++q) st.step(s);
        s.t = dtau * k;
        series.times.push_back(s.t);
        series.positions.push_back(level_crossing(s, level));
    }
    return speed_estimate(series, -1.0, s.t + 1.0).c_hat;
}

}  // namespace

TEST_CASE("supercritical fronts: tail rates and frame speed") {
    ReactionModel model = homog_model();
    DispersionData disp = minimal_speed(model.linearization_field());
    Grid grid = front_grid();

    FrontProfile f25 = compute_front(model, 2.5, disp, grid, 400.0);
    CHECK(f25.T == doctest::Approx(1.0 / 2.5).epsilon(1e-12));
    CHECK(f25.lambda_c == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::abs(f25.lambda_fit - 0.5) <= 0.02 * 0.5);
    CHECK(f25.b_c > 0.0);
    CHECK(f25.construction_residual <= 1e-3 * f25.p_norm);
    double speed = reevolved_speed(f25, model, 12);
    CHECK(std::abs(speed - 2.5) <= 0.005 * 2.5);

    // anchor normalization is exact by construction
    double p0 = f25.p.cell ? (*f25.p.cell)(0.0) : f25.p.at(0.0);
    CHECK(f25.value(0.0, 0.0) == doctest::Approx(0.5 * p0).epsilon(1e-9));

    FrontProfile f30 = compute_front(model, 3.0, disp, grid, 400.0);
    double root = (3.0 - std::sqrt(5.0)) / 2.0;
    CHECK(f30.lambda_c == doctest::Approx(root).epsilon(1e-6));
    CHECK(std::abs(f30.lambda_fit - root) <= 0.02 * root);

    // fixed-point monotonicity in time across the transition region
    for (int j = 0; j < f25.n_phase; ++j) {
        for (int i = 0; i < grid.n_points; ++i) {
            auto s = static_cast<std::size_t>(i);
            double v = f25.phases[static_cast<std::size_t>(j)][s];
            if (v < 0.1 * f25.p_norm || v > 0.9 * f25.p_norm) continue;
            CHECK(f25.phases[static_cast<std::size_t>(j + 1)][s] >= v - 1e-8);
        }
    }

    // explicit window fit agrees with the stored automatic fit
    TailFit tf = tail_fit(f25, 30.0, 60.0);
    CHECK(std::abs(tf.lambda_fit - 0.5) <= 0.02 * 0.5);
    CHECK(tf.log_residual <= 1e-2);

    // a window touching the zero Dirichlet boundary hits the value floor
    double z_edge = grid.x_max - f25.k_anchor * f25.L;
    CHECK_THROWS_WITH_AS(tail_fit(f25, z_edge - 2.0, z_edge + 1.0),
                         doctest::Contains("underflow"), std::runtime_error);
}

TEST_CASE("minimal-speed front in the homogeneous medium") {
    ReactionModel model = homog_model();
    DispersionData disp = minimal_speed(model.linearization_field());
    Grid grid = front_grid();
    FrontProfile f = compute_front(model, disp.c_star(), disp, grid, 400.0);
    CHECK(f.c == disp.c_star());
    CHECK(f.construction_residual <= 1e-3 * f.p_norm);
    CHECK(periodicity_residual(f, model) <= 1e-3 * f.p_norm);

    CHECK_THROWS_WITH_AS(compute_front(model, 0.9 * disp.c_star(), disp, grid, 400.0),
                         doctest::Contains("below minimal speed"), std::runtime_error);
}

TEST_CASE("minimal-speed pulsating front in the cosine medium") {
    ReactionModel model = cosine_model();
    DispersionData disp = minimal_speed(model.linearization_field());
    Grid grid = front_grid();
    FrontProfile f = compute_front(model, disp.c_star(), disp, grid, 400.0);

    // space-time periodicity identity
    CHECK(periodicity_residual(f, model) <= 1e-3 * f.p_norm);
    // anchor normalization
    double p0 = f.p.cell ? (*f.p.cell)(0.0) : f.p.at(0.0);
    CHECK(f.value(0.0, 0.0) == doctest::Approx(0.5 * p0).epsilon(1e-9));
    // profile stays inside (0, p) across the stored window interior
    for (int i = 1; i + 1 < grid.n_points; ++i) {
        auto s = static_cast<std::size_t>(i);
        CHECK(f.phases[0][s] >= 0.0);
        CHECK(f.phases[0][s] <= f.p.values[s] + 1e-8);
    }

    // deliberately corrupted speed: claims c/2, so the re-evolved field
    // travels far ahead of the shifted reference
    FrontProfile bad = f;
    bad.c = 0.5 * f.c;
    bad.T = bad.L / bad.c;
    CHECK(periodicity_residual(bad, model) > 1e-1);
}

TEST_CASE("supercritical front in the cosine medium matches the root module") {
    ReactionModel model = cosine_model();
    DispersionData disp = minimal_speed(model.linearization_field());
    Grid grid = front_grid();
    double c = disp.c_star() + 0.2;
    FrontProfile f = compute_front(model, c, disp, grid, 400.0);
    double lam = lambda_roots(disp, c).minus;
    CHECK(f.lambda_c == doctest::Approx(lam).epsilon(1e-12));
    CHECK(std::abs(f.lambda_fit - lam) <= 0.02 * lam);
}

TEST_CASE("zero field has zero periodicity residual") {
    ReactionModel model = homog_model();
    Grid grid = make_grid(-20.0, 20.0, 1.0, 32);
    FrontProfile z;
    z.c = 2.0;
    z.L = 1.0;
    z.T = 0.5;
    z.grid = grid;
    z.n_phase = 4;
    z.p.values.assign(static_cast<std::size_t>(grid.n_points), 1.0);
    z.p.grid = grid;
    z.p.sup_norm = 1.0;
    z.p_norm = 1.0;
    z.phases.assign(5, std::vector<double>(static_cast<std::size_t>(grid.n_points), 0.0));
    CHECK(periodicity_residual(z, model) == 0.0);
}
