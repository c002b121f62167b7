// SPDX-License-Identifier: Apache-2.0
#include "kpplab/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kpplab {

namespace {

double eval_general(const GeneralPeriodic& g, double x, double u) {
    // clamp u into the table range, wrap x
    double uu = std::clamp(u, 0.0, g.u_max);
    double r = std::fmod(x, g.period);
    if (r < 0.0) r += g.period;
    if (r >= g.period) r = 0.0;
    double tx = r / g.period * g.nx;
    int i = static_cast<int>(tx);
    if (i >= g.nx) i = g.nx - 1;
    double fx = tx - i;
    int i1 = (i + 1) % g.nx;
    double du = g.u_max / (g.nu - 1);
    double tu = uu / du;
    int j = static_cast<int>(tu);
    if (j >= g.nu - 1) j = g.nu - 2;
    double fu = tu - j;
    auto at = [&](int a, int b) { return g.values[static_cast<std::size_t>(a) * g.nu + b]; };
    double f00 = at(i, j), f01 = at(i, j + 1), f10 = at(i1, j), f11 = at(i1, j + 1);
    return (1 - fx) * ((1 - fu) * f00 + fu * f01) + fx * ((1 - fu) * f10 + fu * f11);
}

}  // namespace

ReactionModel::ReactionModel(PeriodicLogistic m) : v_(std::move(m)) {
    const auto& l = std::get<PeriodicLogistic>(v_);
    if (l.mu_hat.period() != l.kappa.period())
        throw std::invalid_argument("ReactionModel: mu_hat and kappa periods differ");
}

ReactionModel::ReactionModel(GeneralPeriodic m) : v_(std::move(m)) {
    const auto& g = std::get<GeneralPeriodic>(v_);
    if (g.nx < 2 || g.nu < 3 || !(g.period > 0.0) || !(g.u_max > 0.0))
        throw std::invalid_argument("ReactionModel: bad tabulation parameters");
    if (g.values.size() != static_cast<std::size_t>(g.nx) * g.nu)
        throw std::invalid_argument("ReactionModel: table size mismatch");
    for (int i = 0; i < g.nx; ++i)
        if (g.values[static_cast<std::size_t>(i) * g.nu] != 0.0)
            throw std::invalid_argument("ReactionModel: tabulated f(x,0) != 0");
}

ReactionModel::ReactionModel(CloseToPeriodic m) : v_(std::move(m)) {
    const auto& c = std::get<CloseToPeriodic>(v_);
    if (!c.base) throw std::invalid_argument("ReactionModel: missing base model");
    if (!c.base->periodic()) throw std::invalid_argument("ReactionModel: base model must be periodic");
    if (c.amplitude < 0.0 || !(c.decay_rate > 0.0))
        throw std::invalid_argument("ReactionModel: need C >= 0 and rho > 0");
}

double ReactionModel::f(double x, double u) const {
    if (!std::isfinite(x) || !std::isfinite(u))
        throw std::invalid_argument("ReactionModel::f: non-finite input");
    if (const auto* l = std::get_if<PeriodicLogistic>(&v_)) return l->mu_hat(x) * u * (l->kappa(x) - u);
    if (const auto* g = std::get_if<GeneralPeriodic>(&v_)) return eval_general(*g, x, u);
    const auto& c = std::get<CloseToPeriodic>(v_);
    return c.base->f(x, u) + c.amplitude * std::exp(-c.decay_rate * std::max(x, 0.0)) * u;
}

double ReactionModel::linearization(double x) const {
    if (const auto* l = std::get_if<PeriodicLogistic>(&v_)) return l->mu_hat(x) * l->kappa(x);
    if (const auto* g = std::get_if<GeneralPeriodic>(&v_)) {
        // f(x,0) = 0, so f(x,h)/h = r + O(h); eliminate the O(h) term.
        const double h = 1e-4;
        double d1 = eval_general(*g, x, h) / h;
        double d2 = eval_general(*g, x, 2 * h) / (2 * h);
        return 2.0 * d1 - d2;
    }
    const auto& c = std::get<CloseToPeriodic>(v_);
    return c.base->linearization(x) + c.amplitude * std::exp(-c.decay_rate * std::max(x, 0.0));
}

double ReactionModel::period() const {
    if (const auto* l = std::get_if<PeriodicLogistic>(&v_)) return l->mu_hat.period();
    if (const auto* g = std::get_if<GeneralPeriodic>(&v_)) return g->period;
    return std::get<CloseToPeriodic>(v_).base->period();
}

bool ReactionModel::periodic() const {
    if (const auto* c = std::get_if<CloseToPeriodic>(&v_)) return c->amplitude == 0.0;
    return true;
}

const ReactionModel& ReactionModel::limiting() const {
    if (const auto* c = std::get_if<CloseToPeriodic>(&v_)) return *c->base;
    return *this;
}

double ReactionModel::saturation_density() const {
    if (const auto* l = std::get_if<PeriodicLogistic>(&v_)) return l->kappa.max();
    // scan: largest s with sup_x f(x,s) >= 0
    double L = period();
    double s_hi = 1.0;
    auto sup_f = [&](double s) {
        double m = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < 256; ++i) m = std::max(m, f(L * i / 256.0, s));
        return m;
    };
    while (sup_f(s_hi) >= 0.0 && s_hi < 1e6) s_hi *= 2.0;
    double lo = 0.0, hi = s_hi;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (sup_f(mid) >= 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

PeriodicField ReactionModel::linearization_field(int n_samples) const {
    const ReactionModel& m = limiting();
    return PeriodicField::from_function([&](double x) { return m.linearization(x); }, m.period(),
                                        n_samples);
}

KppReport ReactionModel::check_kpp(const std::vector<double>& s_grid, int x_resolution) const {
    if (s_grid.size() < 2) throw std::invalid_argument("check_kpp: need at least two densities");
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        if (!(s_grid[i] > 0.0)) throw std::invalid_argument("check_kpp: densities must be positive");
        if (i > 0 && !(s_grid[i] > s_grid[i - 1]))
            throw std::invalid_argument("check_kpp: densities must be strictly increasing");
    }
    double L = period();
    KppReport rep;
    rep.pass = true;
    for (std::size_t i = 0; i + 1 < s_grid.size(); ++i) {
        double s1 = s_grid[i], s2 = s_grid[i + 1];
        double gap = std::numeric_limits<double>::infinity();
        for (int k = 0; k < x_resolution; ++k) {
            double x = L * k / x_resolution;
            gap = std::min(gap, f(x, s1) / s1 - f(x, s2) / s2);
        }
        rep.gaps.push_back(gap);
        if (!(gap > 0.0)) rep.pass = false;
    }
    return rep;
}

ReactionModel make_logistic(PeriodicField mu_hat, PeriodicField kappa) {
    return ReactionModel(PeriodicLogistic{std::move(mu_hat), std::move(kappa)});
}

ReactionModel make_close_to_periodic(ReactionModel base, double amplitude, double decay_rate) {
    return ReactionModel(CloseToPeriodic{std::make_shared<ReactionModel>(std::move(base)),
                                         amplitude, decay_rate});
}

ReactionModel tabulate(const ReactionModel& m, int nx, int nu, double u_max) {
    GeneralPeriodic g;
    g.period = m.period();
    g.nx = nx;
    g.nu = nu;
    g.u_max = u_max;
    g.values.resize(static_cast<std::size_t>(nx) * nu);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nu; ++j)
            g.values[static_cast<std::size_t>(i) * nu + j] =
                (j == 0) ? 0.0 : m.f(g.period * i / nx, u_max * j / (nu - 1));
    return ReactionModel(std::move(g));
}

}  // namespace kpplab
