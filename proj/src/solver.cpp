// SPDX-License-Identifier: Apache-2.0
#include "kpplab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kpplab {

std::vector<double> Grid::nodes() const {
    std::vector<double> xs(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) xs[static_cast<std::size_t>(i)] = x(i);
    return xs;
}

void Grid::validate(double period) const {
    if (n_points < 641) throw std::invalid_argument("Grid: n_points must be >= 641");
    if (!(x_max > x_min)) throw std::invalid_argument("Grid: x_max must exceed x_min");
    if (x_max - x_min < 20.0 * period) throw std::invalid_argument("Grid: span must be >= 20 periods");
    if (dx() > period / 32.0 + 1e-12) throw std::invalid_argument("Grid: dx must be <= L/32");
    double cells = period / dx();
    if (std::abs(cells - std::round(cells)) > 1e-9)
        throw std::invalid_argument("Grid: L/dx must be an integer");
}

Grid make_grid(double x_min, double x_max, double period, int cells_per_period) {
    double dx = period / cells_per_period;
    int n = static_cast<int>(std::round((x_max - x_min) / dx)) + 1;
    Grid g{x_min, x_min + dx * (n - 1), n};
    g.validate(period);
    return g;
}

void SchemeConfig::validate(const Grid& grid) const {
    if (!(dt > 0.0)) throw std::invalid_argument("scheme.dt must be positive");
    if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("scheme.theta must be in [0,1]");
    if (monotone_mode && theta < 1.0) {
        double dx = grid.dx();
        if (dt > dx * dx / 2.0 + 1e-15)
            throw std::invalid_argument("monotone mode requires dt <= dx^2/2 when theta < 1");
    }
}

Stepper::Stepper(const Grid& grid, const ReactionModel& model, const SchemeConfig& scheme)
    : grid_(grid), scheme_(scheme), model_(&model) {
    scheme_.validate(grid_);
    const int n = grid_.n_points;
    const double dx = grid_.dx();
    const double g = scheme_.dt / (dx * dx) * scheme_.theta;

    // Bake per-node reaction tables when the variant allows it.
    const PeriodicLogistic* logi = model.as_logistic();
    const CloseToPeriodic* ctp = model.as_close_to_periodic();
    const PeriodicLogistic* base_logi = ctp ? ctp->base->as_logistic() : nullptr;
    if (logi || base_logi) {
        logistic_like_ = true;
        const PeriodicLogistic& l = logi ? *logi : *base_logi;
        a_.resize(static_cast<std::size_t>(n));
        k_.resize(static_cast<std::size_t>(n));
        pert_.assign(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            double x = grid_.x(i);
            a_[static_cast<std::size_t>(i)] = l.mu_hat(x);
            k_[static_cast<std::size_t>(i)] = l.kappa(x);
            if (ctp)
                pert_[static_cast<std::size_t>(i)] =
                    ctp->amplitude * std::exp(-ctp->decay_rate * std::max(x, 0.0));
        }
    }

    // Thomas factorization of (I - theta dt D2) with the boundary rows:
    // left Dirichlet/Neumann, right Dirichlet 0.
    std::vector<double> sub(static_cast<std::size_t>(n), -g), diag(static_cast<std::size_t>(n), 1.0 + 2.0 * g),
        sup(static_cast<std::size_t>(n), -g);
    if (scheme_.boundary_left == BoundaryLeft::DirichletP) {
        diag[0] = 1.0;
        sup[0] = 0.0;
    } else {
        sup[0] = -2.0 * g;  // mirrored ghost node
    }
    diag[static_cast<std::size_t>(n - 1)] = 1.0;
    sub[static_cast<std::size_t>(n - 1)] = 0.0;

    diag_inv_.resize(static_cast<std::size_t>(n));
    upper_scaled_.resize(static_cast<std::size_t>(n));
    double denom = diag[0];
    diag_inv_[0] = 1.0 / denom;
    upper_scaled_[0] = sup[0] / denom;
    for (int i = 1; i < n; ++i) {
        denom = diag[static_cast<std::size_t>(i)] - sub[static_cast<std::size_t>(i)] * upper_scaled_[static_cast<std::size_t>(i - 1)];
        diag_inv_[static_cast<std::size_t>(i)] = 1.0 / denom;
        upper_scaled_[static_cast<std::size_t>(i)] = sup[static_cast<std::size_t>(i)] * diag_inv_[static_cast<std::size_t>(i)];
    }
    sub_ = std::move(sub);
    rhs_.resize(static_cast<std::size_t>(n));
}

double Stepper::reaction(int i, double u) const {
    if (logistic_like_) {
        auto s = static_cast<std::size_t>(i);
        return a_[s] * u * (k_[s] - u) + pert_[s] * u;
    }
    return model_->f(grid_.x(i), u);
}

void Stepper::step(SolutionState& state) const {
    const int n = grid_.n_points;
    auto& u = state.u;
    if (static_cast<int>(u.size()) != n) throw std::invalid_argument("step: state/grid size mismatch");
    const double dt = scheme_.dt;
    const double dx = grid_.dx();
    const double ge = dt / (dx * dx) * (1.0 - scheme_.theta);

    auto& rhs = rhs_;
    for (int i = 1; i < n - 1; ++i) {
        auto s = static_cast<std::size_t>(i);
        double lap = ge == 0.0 ? 0.0 : ge * (u[s - 1] - 2.0 * u[s] + u[s + 1]);
        rhs[s] = u[s] + lap + dt * reaction(i, u[s]);
    }
    if (scheme_.boundary_left == BoundaryLeft::DirichletP) {
        rhs[0] = scheme_.left_value;
    } else {
        double lap = ge == 0.0 ? 0.0 : ge * (2.0 * u[1] - 2.0 * u[0]);
        rhs[0] = u[0] + lap + dt * reaction(0, u[0]);
    }
    rhs[static_cast<std::size_t>(n - 1)] = 0.0;

    // Thomas solve with the cached factorization.
    u[0] = rhs[0] * diag_inv_[0];
    for (int i = 1; i < n; ++i) {
        auto s = static_cast<std::size_t>(i);
        u[s] = (rhs[s] - sub_[s] * u[s - 1]) * diag_inv_[s];
    }
    for (int i = n - 2; i >= 0; --i) {
        auto s = static_cast<std::size_t>(i);
        u[s] -= upper_scaled_[s] * u[s + 1];
    }

    state.t += dt;

    bool finite = true;
    if (scheme_.monotone_mode) {
        const double cap = scheme_.u_cap;
        for (auto& v : u) {
            if (!std::isfinite(v)) finite = false;
            v = std::clamp(v, 0.0, cap);
        }
    } else {
        for (double v : u)
            if (!std::isfinite(v)) finite = false;
    }
    if (!finite) throw std::runtime_error("step: blow-up at t = " + std::to_string(state.t));
}

void step(SolutionState& state, const ReactionModel& model, const SchemeConfig& scheme) {
    Stepper(state.grid, model, scheme).step(state);
}

RunSummary run(SolutionState& state, const ReactionModel& model, const SchemeConfig& scheme,
               double t_end, std::vector<Probe> probes) {
    if (t_end < state.t) throw std::invalid_argument("run: t_end must be >= state.t");
    const double t0 = state.t;
    auto nsteps = static_cast<long>(std::ceil((t_end - t0) / scheme.dt - 1e-9));
    if (nsteps <= 0) return {0, state.t};

    Stepper stepper(state.grid, model, scheme);
    std::vector<double> next_fire(probes.size());
    for (std::size_t p = 0; p < probes.size(); ++p) {
        if (probes[p].at_start) probes[p].fn(state);
        next_fire[p] = t0 + probes[p].interval;
    }
    for (long k = 1; k <= nsteps; ++k) {
        stepper.step(state);
        state.t = t0 + static_cast<double>(k) * scheme.dt;  // avoid accumulation drift
        for (std::size_t p = 0; p < probes.size(); ++p) {
            if (state.t >= next_fire[p] - 1e-9) {
                probes[p].fn(state);
                next_fire[p] += probes[p].interval;
            }
        }
    }
    return {static_cast<int>(nsteps), state.t};
}

double StationaryState::at(double x) const {
    const double dx = grid.dx();
    double t = (x - grid.x_min) / dx;
    if (t <= 0.0) return values.front();
    if (t >= grid.n_points - 1.0) return values.back();
    auto i = static_cast<std::size_t>(t);
    double f = t - static_cast<double>(i);
    return values[i] + f * (values[i + 1] - values[i]);
}

StationaryState stationary_upper(const ReactionModel& model, const Grid& grid, double tol) {
    const int n = grid.n_points;
    const double dx = grid.dx();
    const double dt = 0.25 * dx;
    const double g = dt / (dx * dx);

    // constant supersolution: raise until f(x, M) <= 0 at every grid point
    double m_start = 1.1 * model.saturation_density();
    for (int k = 0; k < 60; ++k) {
        double fmax = 0.0;
        for (int i = 0; i < n; ++i) fmax = std::max(fmax, model.f(grid.x(i), m_start));
        if (fmax <= 0.0) break;
        m_start *= 2.0;
    }
    std::vector<double> u(static_cast<std::size_t>(n), m_start);

    // Backward-Euler diffusion, Neumann on both sides.
    std::vector<double> diag_inv(static_cast<std::size_t>(n)), csc(static_cast<std::size_t>(n)),
        sub(static_cast<std::size_t>(n), -g);
    {
        std::vector<double> diag(static_cast<std::size_t>(n), 1.0 + 2.0 * g), sup(static_cast<std::size_t>(n), -g);
        sup[0] = -2.0 * g;
        sub[static_cast<std::size_t>(n - 1)] = -2.0 * g;
        double denom = diag[0];
        diag_inv[0] = 1.0 / denom;
        csc[0] = sup[0] / denom;
        for (int i = 1; i < n; ++i) {
            auto s = static_cast<std::size_t>(i);
            denom = diag[s] - sub[s] * csc[s - 1];
            diag_inv[s] = 1.0 / denom;
            csc[s] = sup[s] * diag_inv[s];
        }
    }

    std::vector<double> rhs(static_cast<std::size_t>(n)), prev;
    const int max_iter = 2000000;
    int it = 0;
    for (; it < max_iter; ++it) {
        prev = u;
        for (int i = 0; i < n; ++i) {
            auto s = static_cast<std::size_t>(i);
            rhs[s] = u[s] + dt * model.f(grid.x(i), u[s]);
        }
        u[0] = rhs[0] * diag_inv[0];
        for (int i = 1; i < n; ++i) {
            auto s = static_cast<std::size_t>(i);
            u[s] = (rhs[s] - sub[s] * u[s - 1]) * diag_inv[s];
        }
        for (int i = n - 2; i >= 0; --i) {
            auto s = static_cast<std::size_t>(i);
            u[s] -= csc[s] * u[s + 1];
        }
        double inc = 0.0, dec = 0.0;
        for (int i = 0; i < n; ++i) {
            auto s = static_cast<std::size_t>(i);
            inc = std::max(inc, u[s] - prev[s]);
            dec = std::max(dec, prev[s] - u[s]);
        }
        if (inc > 1e-8) throw std::runtime_error("stationary_upper: scheme not monotone at this dt");
        if (dec / dt < tol) break;
    }
    if (it == max_iter) throw std::runtime_error("stationary_upper: relaxation did not converge");

    StationaryState out;
    out.values = std::move(u);
    out.grid = grid;
    out.periodic = model.periodic();
    out.sup_norm = *std::max_element(out.values.begin(), out.values.end());
    if (out.periodic) {
        const double L = model.period();
        auto cells = static_cast<int>(std::round(L / dx));
        // one cell aligned with x = 0 mod L, near mid-domain
        double mid = 0.5 * (grid.x_min + grid.x_max);
        double x0 = std::floor(mid / L) * L;
        auto i0 = static_cast<int>(std::round((x0 - grid.x_min) / dx));
        std::vector<double> s(static_cast<std::size_t>(cells));
        for (int j = 0; j < cells; ++j) s[static_cast<std::size_t>(j)] = out.values[static_cast<std::size_t>(i0 + j)];
        out.cell = PeriodicField(L, std::move(s), 3);
    }
    return out;
}

std::vector<double> init_bump(const Grid& grid, double a, double b, double height,
                              const SchemeConfig& scheme) {
    const int n = grid.n_points;
    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double x = grid.x(i);
        if (x >= a && x <= b) u[static_cast<std::size_t>(i)] = height;
    }
    // smooth the indicator by one diffusion step
    const double g = scheme.dt / (grid.dx() * grid.dx());
    std::vector<double> v = u;
    for (int i = 1; i < n - 1; ++i) {
        auto s = static_cast<std::size_t>(i);
        v[s] = u[s] + std::min(g, 0.5) * (u[s - 1] - 2.0 * u[s] + u[s + 1]);
    }
    return v;
}

std::vector<double> init_exp_tail(const Grid& grid, const StationaryState& p, double amplitude,
                                  double decay_rate) {
    std::vector<double> u(static_cast<std::size_t>(grid.n_points));
    for (int i = 0; i < grid.n_points; ++i) {
        double x = grid.x(i);
        u[static_cast<std::size_t>(i)] = std::min(p.values[static_cast<std::size_t>(i)],
                                                  amplitude * std::exp(-decay_rate * x));
    }
    u.back() = 0.0;
    return u;
}

std::vector<double> init_heaviside(const Grid& grid, const StationaryState& p, double a) {
    std::vector<double> u(static_cast<std::size_t>(grid.n_points), 0.0);
    for (int i = 0; i < grid.n_points; ++i)
        if (grid.x(i) <= a) u[static_cast<std::size_t>(i)] = p.values[static_cast<std::size_t>(i)];
    return u;
}

}  // namespace kpplab
