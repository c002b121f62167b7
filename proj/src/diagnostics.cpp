// SPDX-License-Identifier: Apache-2.0
#include "kpplab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kpplab {

double level_crossing(const SolutionState& state, double theta) {
    const Grid& g = state.grid;
    const auto& u = state.u;
    for (int i = g.n_points - 2; i >= 0; --i) {
        auto s = static_cast<std::size_t>(i);
        if (u[s] >= theta && u[s + 1] < theta)
            return g.x(i) + g.dx() * (u[s] - theta) / (u[s] - u[s + 1]);
    }
    throw std::runtime_error("level not attained");
}

std::vector<std::optional<double>> hitting_times(const StationLog& log, double level) {
    std::vector<std::optional<double>> out(log.stations.size());
    for (std::size_t k = 0; k < log.stations.size(); ++k) {
        if (log.values.empty()) continue;
        if (log.values[0][k] >= level) {
            out[k] = log.times.front();
            continue;
        }
        for (std::size_t i = 1; i < log.times.size(); ++i) {
            double a = log.values[i - 1][k], b = log.values[i][k];
            if (a < level && b >= level) {
                out[k] = log.times[i - 1] + (log.times[i] - log.times[i - 1]) * (level - a) / (b - a);
                break;
            }
        }
    }
    return out;
}

namespace {

struct Window {
    std::vector<double> t, x;
};

Window window_of(const CrossingSeries& series, double t1, double t2) {
    Window w;
    for (std::size_t i = 0; i < series.times.size(); ++i)
        if (series.times[i] >= t1 && series.times[i] <= t2) {
            w.t.push_back(series.times[i]);
            w.x.push_back(series.positions[i]);
        }
    return w;
}

}  // namespace

SpeedFit speed_estimate(const CrossingSeries& series, double t1, double t2) {
    Window w = window_of(series, t1, t2);
    auto n = static_cast<double>(w.t.size());
    if (w.t.size() < 10) throw std::runtime_error("speed_estimate: fewer than 10 points in window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < w.t.size(); ++i) {
        sx += w.t[i];
        sy += w.x[i];
        sxx += w.t[i] * w.t[i];
        sxy += w.t[i] * w.x[i];
    }
    double denom = n * sxx - sx * sx;
    SpeedFit fit;
    fit.c_hat = (n * sxy - sx * sy) / denom;
    double b = (sy - fit.c_hat * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < w.t.size(); ++i) {
        double e = w.x[i] - (fit.c_hat * w.t[i] + b);
        ss += e * e;
    }
    fit.stderr_c = std::sqrt(ss / (n - 2.0) * n / denom);
    return fit;
}

LogLagFit log_lag_fit(const CrossingSeries& series, double t1, double t2,
                      std::optional<double> c_fixed) {
    Window w = window_of(series, t1, t2);
    if (w.t.size() < 10) throw std::runtime_error("log_lag_fit: fewer than 10 points in window");
    for (double t : w.t)
        if (t <= 0.0) throw std::runtime_error("log_lag_fit: window must have t > 0");

    LogLagFit fit;
    auto n = static_cast<double>(w.t.size());
    if (c_fixed) {
        // y = X - c t = -a ln t + b
        fit.c = *c_fixed;
        double sl = 0, sy = 0, sll = 0, sly = 0;
        for (std::size_t i = 0; i < w.t.size(); ++i) {
            double l = std::log(w.t[i]);
            double y = w.x[i] - fit.c * w.t[i];
            sl += l;
            sy += y;
            sll += l * l;
            sly += l * y;
        }
        double denom = n * sll - sl * sl;
        double slope = (n * sly - sl * sy) / denom;
        fit.a = -slope;
        fit.b = (sy - slope * sl) / n;
        double ss = 0;
        for (std::size_t i = 0; i < w.t.size(); ++i) {
            double l = std::log(w.t[i]);
            double e = (w.x[i] - fit.c * w.t[i]) - (slope * l + fit.b);
            ss += e * e;
        }
        fit.a_stderr = std::sqrt(ss / (n - 2.0) * n / denom);
        return fit;
    }

    // normal equations for X = c t - a ln t + b, unknowns (c, -a, b)
    double g[3][4] = {};
    for (std::size_t i = 0; i < w.t.size(); ++i) {
        double row[3] = {w.t[i], std::log(w.t[i]), 1.0};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) g[r][c] += row[r] * row[c];
            g[r][3] += row[r] * w.x[i];
        }
    }
    for (int col = 0; col < 3; ++col) {  // Gaussian elimination with partial pivoting
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
        if (std::abs(g[piv][col]) < 1e-300)
            throw std::runtime_error("log_lag_fit: singular normal equations");
        std::swap(g[piv], g[col]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double m = g[r][col] / g[col][col];
            for (int c = col; c < 4; ++c) g[r][c] -= m * g[col][c];
        }
    }
    fit.c = g[0][3] / g[0][0];
    double slope = g[1][3] / g[1][1];
    fit.a = -slope;
    fit.b = g[2][3] / g[2][2];
    double ss = 0;
    for (std::size_t i = 0; i < w.t.size(); ++i) {
        double e = w.x[i] - (fit.c * w.t[i] + slope * std::log(w.t[i]) + fit.b);
        ss += e * e;
    }
    fit.a_stderr = std::sqrt(ss / std::max(1.0, n - 3.0));
    return fit;
}

ShiftSeries shift_estimate(const CrossingSeries& series, double c_star, double /*lambda_star*/,
                           double t_burn, double period) {
    double t_end = series.times.empty() ? 0.0 : series.times.back();
    if (!(t_end >= 10.0 * std::max(t_burn, 1e-300)) && t_end < t_burn + 1.0)
        throw std::runtime_error("shift_estimate: series too short past burn-in");
    LogLagFit fit = log_lag_fit(series, t_burn, t_end, c_star);

    ShiftSeries out;
    out.a_fit = fit.a;
    out.a_stderr = fit.a_stderr;
    out.a_time = fit.a / c_star;
    out.b_fit = fit.b;

    // per-phase offset table of the residual wobble, indexed by spatial phase
    constexpr int n_bins = 16;
    std::vector<double> bin_sum(n_bins, 0.0);
    std::vector<int> bin_cnt(n_bins, 0);
    auto phase_bin = [&](double x) {
        double s = x / period - std::floor(x / period);
        int b = static_cast<int>(s * n_bins);
        return std::clamp(b, 0, n_bins - 1);
    };
    if (period > 0.0) {
        for (std::size_t i = 0; i < series.times.size(); ++i) {
            double t = series.times[i];
            if (t < t_burn) continue;
            double resid = series.positions[i] - (c_star * t - fit.a * std::log(t) + fit.b);
            int b = phase_bin(series.positions[i]);
            bin_sum[b] += resid;
            ++bin_cnt[b];
        }
    }

    for (std::size_t i = 0; i < series.times.size(); ++i) {
        double t = series.times[i];
        if (t < t_burn) continue;
        double w = 0.0;
        if (period > 0.0) {
            int b = phase_bin(series.positions[i]);
            if (bin_cnt[b] > 0) w = bin_sum[b] / bin_cnt[b];
        }
        // X = c* t - a ln t + b + w, so c* t - X + b + w isolates a ln t
        double lag = c_star * t - series.positions[i] + fit.b + w;
        out.times.push_back(t);
        out.spatial_lag.push_back(lag);
        out.m_values.push_back(lag / c_star);
    }
    return out;
}

namespace {

// thresholded sign sequence with zeros dropped
std::vector<int> sign_pattern(const std::vector<double>& u1, const std::vector<double>& u2,
                              double deadband) {
    std::vector<int> s;
    for (std::size_t i = 0; i < u1.size(); ++i) {
        double d = u1[i] - u2[i];
        if (std::abs(d) <= deadband) continue;
        int sg = d > 0.0 ? 1 : -1;
        if (s.empty() || s.back() != sg) s.push_back(sg);
    }
    return s;
}

}  // namespace

bool is_steeper(const std::vector<double>& u1, const std::vector<double>& u2, double deadband) {
    if (u1.size() != u2.size()) throw std::invalid_argument("is_steeper: grids differ");
    auto s = sign_pattern(u1, u2, deadband);
    if (s.size() > 2) return false;
    if (s.size() == 2) return s[0] == 1 && s[1] == -1;
    return true;  // one sign or equality throughout
}

int intersection_count(const std::vector<double>& u1, const std::vector<double>& u2,
                       double deadband) {
    if (u1.size() != u2.size()) throw std::invalid_argument("intersection_count: grids differ");
    auto s = sign_pattern(u1, u2, deadband);
    return s.empty() ? 0 : static_cast<int>(s.size()) - 1;
}

double half_line_distance(const SolutionState& state, const FrontProfile& profile, double a,
                          double shift) {
    const Grid& g = state.grid;
    double d = 0.0;
    for (int i = 0; i < g.n_points; ++i) {
        double x = g.x(i);
        if (x < a) continue;
        d = std::max(d, std::abs(state.u[static_cast<std::size_t>(i)] -
                                 profile.value(state.t - shift, x)));
    }
    return d;
}

ShiftedDistance best_shift_distance(const SolutionState& state, const FrontProfile& profile,
                                    double a, double center_shift) {
    double center = center_shift;
    if (std::isnan(center)) {
        double level = 0.5 * (profile.p.cell ? (*profile.p.cell)(0.0) : profile.p.at(0.0));
        double xu = level_crossing(state, level);
        center = state.t - xu / profile.c;
    }
    const double T = profile.T;
    double lo = center - 2.0 * T, hi = center + 2.0 * T;

    auto f = [&](double s) { return half_line_distance(state, profile, a, s); };

    // coarse scan to bracket the minimum
    constexpr int m = 33;
    int imin = 0;
    double fmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        double s = lo + (hi - lo) * i / (m - 1);
        double v = f(s);
        if (v < fmin) {
            fmin = v;
            imin = i;
        }
    }
    double aa = lo + (hi - lo) * std::max(0, imin - 1) / (m - 1);
    double bb = lo + (hi - lo) * std::min(m - 1, imin + 1) / (m - 1);

    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = bb - gr * (bb - aa), x2 = aa + gr * (bb - aa);
    double f1 = f(x1), f2 = f(x2);
    while (bb - aa > 1e-6 * T) {
        if (f1 < f2) {
            bb = x2;
            x2 = x1;
            f2 = f1;
            x1 = bb - gr * (bb - aa);
            f1 = f(x1);
        } else {
            aa = x1;
            x1 = x2;
            f1 = f2;
            x2 = aa + gr * (bb - aa);
            f2 = f(x2);
        }
    }
    ShiftedDistance out;
    out.shift = f1 < f2 ? x1 : x2;
    out.distance = std::min(f1, f2);
    return out;
}

}  // namespace kpplab
