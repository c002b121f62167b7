// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "kpplab/diagnostics.hpp"
#include "kpplab/floquet.hpp"
#include "kpplab/solver.hpp"
#include "oracle.hpp"

using namespace kpplab;

namespace {

ReactionModel homog_logistic() {
    return make_logistic(PeriodicField::constant(1.0, 1.0), PeriodicField::constant(1.0, 1.0));
}

ReactionModel sine_logistic() {
    return make_logistic(PeriodicField::constant(1.0, 1.0),
                         PeriodicField::from_fourier({1.0, 0.0, 0.25}, 1.0));
}

SchemeConfig default_scheme(const Grid& grid, double u_cap = 1.0) {
    SchemeConfig s;
    s.dt = 0.25 * grid.dx();
    s.u_cap = u_cap;
    return s;
}

}  // namespace

TEST_CASE("grid construction: integral cells per period, desk-scale bounds") {
    Grid g = make_grid(-20.0, 60.0, 1.0, 64);
    CHECK(g.n_points == 80 * 64 + 1);
    CHECK(g.dx() == doctest::Approx(1.0 / 64).epsilon(1e-15));
    CHECK_NOTHROW(g.validate(1.0));
    // span below 20 periods is rejected at construction
    CHECK_THROWS(make_grid(0.0, 10.0, 1.0, 64));
    // dx coarser than L/32 is rejected
    CHECK_THROWS(make_grid(-20.0, 20.0, 1.0, 16));
}

TEST_CASE("pure diffusion obeys the discrete maximum principle") {
    ReactionModel zero = make_logistic(PeriodicField::constant(0.0, 1.0),
                                       PeriodicField::constant(1.0, 1.0));
    Grid grid = make_grid(-20.0, 20.0, 1.0, 32);
    SchemeConfig scheme = default_scheme(grid);
    SolutionState s;
    s.grid = grid;
    s.u.assign(static_cast<std::size_t>(grid.n_points), 0.0);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (auto& v : s.u) v = uni(rng);
    s.u.back() = 0.0;
    double m0 = *std::max_element(s.u.begin(), s.u.end());
    Stepper st(grid, zero, scheme);
    for (int k = 0; k < 100; ++k) {
        st.step(s);
        double m = *std::max_element(s.u.begin(), s.u.end());
        CHECK(m <= m0 + 1e-13);
        m0 = m;
    }
}

TEST_CASE("constant data follow the logistic ordinary differential equation") {
    ReactionModel model = homog_logistic();
    Grid grid = make_grid(-20.0, 20.0, 1.0, 32);
    SchemeConfig scheme;
    scheme.dt = 1e-3;
    scheme.u_cap = 1.0;
    SolutionState s;
    s.grid = grid;
    s.u.assign(static_cast<std::size_t>(grid.n_points), 0.5);
    run(s, model, scheme, 1.0);
    // away from the Dirichlet right boundary the solution stays x-constant
    double expected = std::exp(1.0) / (1.0 + std::exp(1.0));
    double mid = s.u[static_cast<std::size_t>(grid.n_points / 2)];
    CHECK(std::abs(mid - expected) <= 5e-3);
}

TEST_CASE("comparison principle: fifty ordered pairs stay ordered") {
    ReactionModel model = sine_logistic();
    Grid grid = make_grid(-20.0, 20.0, 1.0, 32);
    SchemeConfig scheme = default_scheme(grid, 1.25);
    Stepper st(grid, model, scheme);
    std::mt19937_64 rng(20240701);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const auto n = static_cast<std::size_t>(grid.n_points);
    int ok = 0;
    for (int pair = 0; pair < 50; ++pair) {
        SolutionState lo, hi;
        lo.grid = hi.grid = grid;
        lo.u.resize(n);
        hi.u.resize(n);
        double amp = 0.2 + 0.8 * uni(rng);
        double k1 = 0.5 + 4.0 * uni(rng), k2 = 0.5 + 4.0 * uni(rng), ph = uni(rng);
        for (std::size_t i = 0; i < n; ++i) {
            double x = grid.x(static_cast<int>(i));
            double v = amp * std::abs(std::sin(k1 * x + ph)) *
                       (0.55 + 0.45 * std::cos(k2 * x));
            hi.u[i] = std::clamp(v, 0.0, 1.2);
            lo.u[i] = hi.u[i] * (0.2 + 0.6 * uni(rng));
        }
        lo.u.back() = hi.u.back() = 0.0;
        double worst = 0.0;
        bool ordered = true;
        for (int step_i = 0; step_i < 200; ++step_i) {
            st.step(lo);
            st.step(hi);
            for (std::size_t i = 0; i < n; ++i)
                worst = std::min(worst, hi.u[i] - lo.u[i]);
            if (worst < -1e-10) ordered = false;
        }
        if (ordered) ++ok;
    }
    CHECK(ok == 50);
}

TEST_CASE("invariant interval: data below p stay in [0, p]") {
    ReactionModel model = sine_logistic();
    Grid grid = make_grid(-20.0, 20.0, 1.0, 32);
    StationaryState p = stationary_upper(model, grid, 1e-9);
    SchemeConfig scheme = default_scheme(grid, p.sup_norm);
    SolutionState s;
    s.grid = grid;
    s.u = init_bump(grid, -2.0, 2.0, 0.9, scheme);
    const auto n = static_cast<std::size_t>(grid.n_points);
    for (std::size_t i = 0; i < n; ++i) s.u[i] = std::min(s.u[i], p.values[i]);
    std::vector<Probe> probes;
    bool inside = true;
    probes.push_back({1.0, [&](const SolutionState& st) {
                          for (std::size_t i = 0; i < n; ++i)
                              if (st.u[i] < 0.0 || st.u[i] > p.values[i] + 1e-8) inside = false;
                      },
                      true});
    run(s, model, scheme, 20.0, std::move(probes));
    CHECK(inside);
}

TEST_CASE("space convergence of the front position is second order") {
    ReactionModel model = homog_logistic();
    double pos[3];
    int k = 0;
    for (int cpp : {32, 64, 128}) {
        Grid grid = make_grid(-20.0, 44.0, 1.0, cpp);
        SchemeConfig scheme;
        scheme.dt = 2e-3;  // fixed dt so the splitting error cancels in differences
        scheme.u_cap = 1.0;
        SolutionState s;
        s.grid = grid;
        // smooth resolution-independent datum; an indicator would add an
        // O(dx) data error from its half-cell edge placement
        s.u.resize(static_cast<std::size_t>(grid.n_points));
        for (int i = 0; i < grid.n_points; ++i) {
            double x = grid.x(i);
            s.u[static_cast<std::size_t>(i)] = std::exp(-x * x);
        }
        s.u.back() = 0.0;
        run(s, model, scheme, 10.0);
        pos[k++] = level_crossing(s, 0.5);
    }
    double order = std::log2(std::abs(pos[0] - pos[1]) / std::abs(pos[1] - pos[2]));
    CHECK(order >= 1.7);
}

TEST_CASE("runs are deterministic and observers fire on schedule") {
    ReactionModel model = sine_logistic();
    Grid grid = make_grid(-20.0, 20.0, 1.0, 32);
    SchemeConfig scheme = default_scheme(grid, 1.25);
    auto make_state = [&] {
        SolutionState s;
        s.grid = grid;
        s.u = init_bump(grid, -2.0, 2.0, 1.0, scheme);
        return s;
    };

    SolutionState a = make_state();
    int fired = 0;
    std::vector<Probe> probes;
    probes.push_back({1.0, [&](const SolutionState&) { ++fired; }, true});
    RunSummary sum = run(a, model, scheme, 10.0, std::move(probes));
    CHECK(fired == 11);  // initial state plus ten interval hits
    CHECK(sum.t_final == doctest::Approx(10.0).epsilon(1e-12));

    SolutionState b = make_state();
    run(b, model, scheme, 10.0);
    CHECK(a.u == b.u);

    // t_end equal to the current time is the identity
    SolutionState c = make_state();
    std::vector<double> before = c.u;
    RunSummary none = run(c, model, scheme, c.t);
    CHECK(none.steps == 0);
    CHECK(c.u == before);
}

TEST_CASE("stationary state: homogeneous carrying capacity") {
    ReactionModel model = homog_logistic();
    Grid grid = make_grid(-20.0, 20.0, 1.0, 32);
    StationaryState p = stationary_upper(model, grid, 1e-9);
    for (double v : p.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(p.periodic);
    REQUIRE(p.cell.has_value());
    CHECK((*p.cell)(0.3) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("stationary state: sine capacity, residual and Newton oracle") {
    ReactionModel model = sine_logistic();
    Grid grid = make_grid(-20.0, 20.0, 1.0, 64);
    StationaryState p = stationary_upper(model, grid, 1e-9);
    double dx = grid.dx();
    double resid = 0.0, mn = 1e300;
    for (int i = 1; i + 1 < grid.n_points; ++i) {
        auto s = static_cast<std::size_t>(i);
        double lap = (p.values[s + 1] - 2.0 * p.values[s] + p.values[s - 1]) / (dx * dx);
        resid = std::max(resid, std::abs(lap + model.f(grid.x(i), p.values[s])));
        mn = std::min(mn, p.values[s]);
    }
    CHECK(resid <= 1e-6);
    CHECK(mn > 0.0);

    std::vector<double> cell = oracle::stationary_cell(model, 64);
    for (std::size_t j = 0; j < cell.size(); ++j) {
        double x = static_cast<double>(j) / 64.0;
        CHECK((*p.cell)(x) == doctest::Approx(cell[j]).epsilon(1e-5));
    }
}

TEST_CASE("perturbed stationary state rejoins the periodic one to the right") {
    ReactionModel base = sine_logistic();
    DispersionData disp = minimal_speed(base.linearization_field());
    ReactionModel ctp = make_close_to_periodic(base, 1.0, 2.0 * disp.lambda_star());
    Grid grid = make_grid(-20.0, 40.0, 1.0, 64);
    StationaryState p = stationary_upper(ctp, grid, 1e-9);
    StationaryState pt = stationary_upper(base, grid, 1e-9);
    CHECK_FALSE(p.periodic);
    CHECK(std::abs(p.at(15.0) - pt.at(15.0)) <= 1e-3 * pt.sup_norm);
}

TEST_CASE("left boundary does not contaminate the right half") {
    ReactionModel model = sine_logistic();
    SolutionState a, b;
    for (int variant = 0; variant < 2; ++variant) {
        Grid grid = make_grid(variant == 0 ? -20.0 : -30.0, 60.0, 1.0, 32);
        SchemeConfig scheme = default_scheme(grid, 1.25);
        SolutionState s;
        s.grid = grid;
        s.u = init_bump(grid, 0.0, 1.0, 1.0, scheme);
        run(s, model, scheme, 10.0);
        (variant == 0 ? a : b) = std::move(s);
    }
    double worst = 0.0;
    for (int i = 0; i < a.grid.n_points; ++i) {
        double x = a.grid.x(i);
        if (x < 20.0) continue;
        auto j = static_cast<std::size_t>(std::lround((x - b.grid.x_min) / b.grid.dx()));
        worst = std::max(worst, std::abs(a.u[static_cast<std::size_t>(i)] - b.u[j]));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("initial data library shapes") {
    ReactionModel model = sine_logistic();
    Grid grid = make_grid(-20.0, 20.0, 1.0, 32);
    StationaryState p = stationary_upper(model, grid, 1e-9);
    SchemeConfig scheme = default_scheme(grid, p.sup_norm);

    std::vector<double> bump = init_bump(grid, -1.0, 1.0, 0.8, scheme);
    CHECK(*std::max_element(bump.begin(), bump.end()) <= 0.8 + 1e-12);
    CHECK(bump.front() == 0.0);
    CHECK(bump.back() == 0.0);

    std::vector<double> heav = init_heaviside(grid, p, 0.0);
    auto i_left = static_cast<std::size_t>(std::lround((-5.0 - grid.x_min) / grid.dx()));
    auto i_right = static_cast<std::size_t>(std::lround((5.0 - grid.x_min) / grid.dx()));
    CHECK(heav[i_left] == doctest::Approx(p.values[i_left]).epsilon(1e-12));
    CHECK(heav[i_right] == 0.0);

    std::vector<double> tail = init_exp_tail(grid, p, 1.0, 1.0);
    CHECK(tail[i_right] <= std::exp(-5.0) + 1e-12);
    for (std::size_t i = 0; i < tail.size(); ++i) CHECK(tail[i] <= p.values[i] + 1e-12);
}
