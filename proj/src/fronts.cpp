// SPDX-License-Identifier: Apache-2.0
#include "kpplab/fronts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kpplab {

namespace {

double interp_grid(const Grid& g, const std::vector<double>& u, double x) {
    double t = (x - g.x_min) / g.dx();
    if (t <= 0.0) return u.front();
    if (t >= g.n_points - 1.0) return u.back();
    auto i = static_cast<std::size_t>(t);
    double f = t - static_cast<double>(i);
    return u[i] + f * (u[i + 1] - u[i]);
}

double rightmost_level_crossing(const Grid& g, const std::vector<double>& u, double level) {
    for (int i = g.n_points - 2; i >= 0; --i) {
        auto s = static_cast<std::size_t>(i);
        if (u[s] >= level && u[s + 1] < level)
            return g.x(i) + g.dx() * (u[s] - level) / (u[s] - u[s + 1]);
    }
    throw std::runtime_error("level not attained");
}

}  // namespace

double FrontProfile::value(double t, double x) const {
    double tau = t + t_anchor;
    double xi = x + static_cast<double>(k_anchor) * L;
    double m = std::floor(tau / T);
    tau -= m * T;
    xi -= m * L;
    if (tau < 0.0) tau = 0.0;

    if (xi <= grid.x_min) return p.cell ? (*p.cell)(xi) : p.values.front();
    if (xi >= grid.x_max) return 0.0;

    double dtau = T / n_phase;
    double tj = tau / dtau;
    auto j = static_cast<std::size_t>(tj);
    if (j >= static_cast<std::size_t>(n_phase)) j = static_cast<std::size_t>(n_phase) - 1;
    double f = tj - static_cast<double>(j);
    double a = interp_grid(grid, phases[j], xi);
    double b = interp_grid(grid, phases[j + 1], xi);
    return a + f * (b - a);
}

std::vector<double> FrontProfile::field_at(double t) const {
    std::vector<double> out(static_cast<std::size_t>(grid.n_points));
    for (int i = 0; i < grid.n_points; ++i)
        out[static_cast<std::size_t>(i)] = value(t, grid.x(i) - static_cast<double>(k_anchor) * L);
    return out;
}

FrontProfile compute_front(const ReactionModel& model, double c, const DispersionData& disp,
                           const Grid& grid, double horizon, FrontOptions opts) {
    if (!model.periodic()) throw std::invalid_argument("compute_front: model must be periodic");
    const double c_star = disp.c_star();
    if (c < c_star - 1e-9)
        throw std::runtime_error("compute_front: no pulsating wave below minimal speed");
    if (c < c_star) c = c_star;

    const double L = model.period();
    grid.validate(L);
    const double dx = grid.dx();
    if (std::abs(grid.x_min / dx - std::round(grid.x_min / dx)) > 1e-9)
        throw std::invalid_argument("compute_front: x_min must lie on the dx lattice");

    FrontProfile pr;
    pr.c = c;
    pr.L = L;
    pr.T = L / c;
    pr.grid = grid;
    pr.n_phase = opts.n_phase;
    pr.p = stationary_upper(model, grid, 1e-9);
    pr.p_norm = pr.p.sup_norm;

    const bool minimal = (c == c_star);
    pr.lambda_c = minimal ? disp.lambda_star() : lambda_roots(disp, c).minus;
    pr.phi_c = principal_eigen(disp.r(), pr.lambda_c, disp.n_cell()).phi;

    const double dtau = pr.T / opts.n_phase;
    const auto substeps = std::max(1L, std::lround(dtau / (0.25 * dx)));
    SchemeConfig scheme;
    scheme.dt = dtau / static_cast<double>(substeps);
    scheme.theta = 1.0;
    scheme.monotone_mode = true;
    scheme.u_cap = pr.p_norm;
    scheme.boundary_left = BoundaryLeft::DirichletP;
    scheme.left_value = pr.p.values.front();

    SolutionState state;
    state.grid = grid;
    state.t = 0.0;
    if (minimal) {
        state.u = init_heaviside(grid, pr.p, grid.x_min + opts.heaviside_offset * L);
    } else {
        state.u.resize(static_cast<std::size_t>(grid.n_points));
        for (int i = 0; i < grid.n_points; ++i) {
            double x = grid.x(i);
            double tail = pr.phi_c(x) * std::exp(-pr.lambda_c * x);
            state.u[static_cast<std::size_t>(i)] =
                std::min(pr.p.values[static_cast<std::size_t>(i)], tail);
        }
        state.u.back() = 0.0;
    }

    Stepper stepper(grid, model, scheme);
    const auto shift_cells = static_cast<int>(std::round(L / dx));
    const double p0 = pr.p.cell ? (*pr.p.cell)(0.0) : pr.p.at(0.0);
    const double level = 0.5 * p0;
    const double tol_abs = opts.tol_front * pr.p_norm;

    // interior comparison window, away from both boundaries
    const auto i_lo = static_cast<int>(std::round(2.0 * L / dx)) + shift_cells;
    const int i_hi = grid.n_points - 1 - static_cast<int>(std::round(2.0 * L / dx));

    std::vector<std::vector<double>> ring(static_cast<std::size_t>(opts.n_phase + 1));
    ring[0] = state.u;
    std::vector<double> times{0.0}, crossings{rightmost_level_crossing(grid, state.u, level)};
    int good_in_a_row = 0;
    double last_resid = std::numeric_limits<double>::infinity();
    bool converged = false;
    long snap = 0;
    while (state.t < horizon - 1e-9) {
        for (long s = 0; s < substeps; ++s) stepper.step(state);
        ++snap;
        state.t = static_cast<double>(snap) * dtau;
        auto slot = static_cast<std::size_t>(snap % (opts.n_phase + 1));
        // residual against the snapshot one period earlier, shifted by L
        if (snap >= opts.n_phase + 1 || (snap == opts.n_phase && true)) {
            // nothing; comparisons start once a full period is buffered
        }
        if (snap >= opts.n_phase) {
            const auto& old = ring[static_cast<std::size_t>((snap - opts.n_phase) % (opts.n_phase + 1))];
            double r = 0.0;
            for (int i = i_lo; i <= i_hi; ++i)
                r = std::max(r, std::abs(state.u[static_cast<std::size_t>(i)] -
                                         old[static_cast<std::size_t>(i - shift_cells)]));
            last_resid = r;
            good_in_a_row = (r <= tol_abs) ? good_in_a_row + 1 : 0;
        }
        ring[slot] = state.u;
        double xc = rightmost_level_crossing(grid, state.u, level);
        times.push_back(state.t);
        crossings.push_back(xc);
        if (xc > grid.x_max - 10.0 * L)
            throw std::runtime_error("compute_front: front within 10 periods of the right boundary");
        if (good_in_a_row >= opts.n_phase) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error("compute_front: horizon reached before shape convergence, residual " +
                                 std::to_string(last_resid));

    pr.construction_residual = last_resid;
    pr.horizon_used = state.t;
    // the ring holds one full period ending now; unroll oldest-first
    pr.phases.resize(static_cast<std::size_t>(opts.n_phase + 1));
    for (int j = 0; j <= opts.n_phase; ++j)
        pr.phases[static_cast<std::size_t>(j)] =
            ring[static_cast<std::size_t>((snap - opts.n_phase + j) % (opts.n_phase + 1))];

    // crossing-speed estimate on the second half of the run
    {
        std::size_t n = times.size(), from = n / 2;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        auto m = static_cast<double>(n - from);
        for (std::size_t i = from; i < n; ++i) {
            sx += times[i];
            sy += crossings[i];
            sxx += times[i] * times[i];
            sxy += times[i] * crossings[i];
        }
        pr.measured_speed = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }

    // anchor: station k*L where the level p(0)/2 is crossed within the period
    {
        int best_k = 0, best_j = -1;
        double best_t = 0.0;
        auto k_min = static_cast<int>(std::ceil((grid.x_min + 2.0 * L) / L));
        auto k_max = static_cast<int>(std::floor((grid.x_max - 2.0 * L) / L));
        for (int k = k_max; k >= k_min; --k) {
            auto node = static_cast<std::size_t>(std::llround((k * L - grid.x_min) / dx));
            for (int j = 0; j < opts.n_phase; ++j) {
                double s0 = pr.phases[static_cast<std::size_t>(j)][node];
                double s1 = pr.phases[static_cast<std::size_t>(j + 1)][node];
                if (s0 <= level && level < s1) {
                    best_k = k;
                    best_j = j;
                    best_t = dtau * (static_cast<double>(j) + (level - s0) / (s1 - s0));
                    break;
                }
            }
            if (best_j >= 0) break;
        }
        if (best_j < 0) throw std::runtime_error("compute_front: anchor level never crossed in period");
        pr.k_anchor = best_k;
        pr.t_anchor = best_t;
    }

    // automatic tail window
    try {
        double anchor_x = pr.k_anchor * L;
        double z_lo = 0.0, z_hi = 0.0;
        bool have_lo = false;
        for (int i = 0; i < grid.n_points; ++i) {
            double z = grid.x(i) - anchor_x;
            if (z <= 0.0) continue;
            double v = pr.value(0.0, z);
            if (!have_lo && v < 0.5e-2 * pr.p_norm) {
                z_lo = z;
                have_lo = true;
            }
            if (v > 1e-7) z_hi = z;
        }
        if (have_lo && z_hi > z_lo + 2.0 * L) {
            TailFit tf = tail_fit(pr, z_lo, z_hi);
            pr.lambda_fit = tf.lambda_fit;
            pr.b_c = tf.b_c;
        }
    } catch (const std::exception&) {
        // tail window unusable (e.g. short domain); leave the fit empty
    }
    return pr;
}

double periodicity_residual(const FrontProfile& profile, const ReactionModel& model) {
    const Grid& grid = profile.grid;
    const double dx = grid.dx();
    const auto shift_cells = static_cast<int>(std::round(profile.L / dx));

    const auto substeps = std::max(1L, std::lround(profile.T / profile.n_phase / (0.25 * dx)));
    SchemeConfig scheme;
    scheme.dt = profile.T / profile.n_phase / static_cast<double>(substeps);
    scheme.theta = 1.0;
    scheme.monotone_mode = true;
    scheme.u_cap = profile.p_norm;
    scheme.boundary_left = BoundaryLeft::DirichletP;
    scheme.left_value = profile.p.values.front();

    SolutionState state;
    state.grid = grid;
    state.t = 0.0;
    state.u = profile.phases[0];
    if (state.u.empty()) return 0.0;

    bool trivial = true;
    for (double v : state.u)
        if (v != 0.0) trivial = false;
    if (trivial) return 0.0;

    Stepper stepper(grid, model, scheme);
    long total = substeps * profile.n_phase;
    for (long s = 0; s < total; ++s) stepper.step(state);

    const auto i_lo = static_cast<int>(std::round(2.0 * profile.L / dx)) + shift_cells;
    const int i_hi = grid.n_points - 1 - static_cast<int>(std::round(2.0 * profile.L / dx));
    double r = 0.0;
    for (int i = i_lo; i <= i_hi; ++i)
        r = std::max(r, std::abs(state.u[static_cast<std::size_t>(i)] -
                                 profile.phases[0][static_cast<std::size_t>(i - shift_cells)]));
    return r;
}

TailFit tail_fit(const FrontProfile& profile, double z_lo, double z_hi) {
    if (!(z_hi > z_lo)) throw std::invalid_argument("tail_fit: empty window");
    const Grid& grid = profile.grid;
    const double anchor_x = profile.k_anchor * profile.L;

    std::vector<double> zs, logs;
    for (int i = 0; i < grid.n_points; ++i) {
        double z = grid.x(i) - anchor_x;
        if (z < z_lo || z > z_hi) continue;
        double v = profile.value(0.0, z);
        if (!(v > 1e-300)) throw std::runtime_error("tail_fit: tail underflow; shrink window");
        double phi = profile.phi_c(z);
        zs.push_back(z);
        logs.push_back(std::log(v / phi));
    }
    if (zs.size() < 8) throw std::runtime_error("tail_fit: too few points in window");

    auto n = static_cast<double>(zs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        sx += zs[i];
        sy += logs[i];
        sxx += zs[i] * zs[i];
        sxy += zs[i] * logs[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    TailFit out;
    out.lambda_fit = -slope;
    out.b_c = std::exp(intercept);
    double ss = 0.0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        double e = logs[i] - (intercept + slope * zs[i]);
        ss += e * e;
    }
    out.log_residual = std::sqrt(ss / n);
    return out;
}

}  // namespace kpplab
