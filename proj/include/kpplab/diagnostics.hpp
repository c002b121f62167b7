// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "kpplab/fronts.hpp"
#include "kpplab/solver.hpp"

namespace kpplab {

/// Rightmost-crossing positions of a fixed level over time.
struct CrossingSeries {
    double theta = 0.0;
    std::vector<double> times;
    std::vector<double> positions;
};

/// Rightmost x where u crosses theta, scanning from the right with linear
/// interpolation between the bracketing nodes.
double level_crossing(const SolutionState& state, double theta);

/// Station samples u(t, station_k) collected along a run.
struct StationLog {
    std::vector<double> stations;
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // values[i][k] = u(times[i], stations[k])
};

/// First-passage time of the level at each station, linearly interpolated in
/// t; absent when the station is never reached.
std::vector<std::optional<double>> hitting_times(const StationLog& log, double level);

struct SpeedFit {
    double c_hat = 0.0;
    double stderr_c = 0.0;
};

/// Least-squares slope of X(t) on the window [t1, t2]; needs >= 10 points.
SpeedFit speed_estimate(const CrossingSeries& series, double t1, double t2);

/// Fit X(t) = c t - a ln t + b on [t1, t2]; c may be pinned.
struct LogLagFit {
    double c = 0.0;
    double a = 0.0;
    double b = 0.0;
    double a_stderr = 0.0;
};
LogLagFit log_lag_fit(const CrossingSeries& series, double t1, double t2,
                      std::optional<double> c_fixed = std::nullopt);

struct ShiftSeries {
    std::vector<double> times;        // >= t_burn
    std::vector<double> m_values;     // time units
    std::vector<double> spatial_lag;  // c* m(t)
    double a_fit = 0.0;               // spatial log-lag coefficient
    double a_stderr = 0.0;
    double a_time = 0.0;  // a_fit / c*
    double b_fit = 0.0;
};

/// Shift series m(t) = (c* t - X(t) - b - w(phase)) / c* from a crossing
/// series, with the L-periodic wobble w removed by a per-phase offset table
/// when period > 0.
ShiftSeries shift_estimate(const CrossingSeries& series, double c_star, double lambda_star,
                           double t_burn, double period = 0.0);

/// True iff the deadband-thresholded signs of u1 - u2, zeros dropped, read
/// (+)*(-)* left to right: u1 dominates left of every crossing, u2 right.
bool is_steeper(const std::vector<double>& u1, const std::vector<double>& u2, double deadband);

/// Sign changes of the thresholded difference; a zero-run counts as at most
/// one potential change.
int intersection_count(const std::vector<double>& u1, const std::vector<double>& u2,
                       double deadband);

/// sup over grid nodes x >= a of |u(x) - U(t - shift, x)|.
double half_line_distance(const SolutionState& state, const FrontProfile& profile, double a,
                          double shift);

struct ShiftedDistance {
    double shift = 0.0;
    double distance = 0.0;
};

/// Minimizes half_line_distance over shift in [center - 2T, center + 2T] by a
/// coarse scan plus golden-section refinement; center defaults to the
/// crossing-predicted value when NaN.
ShiftedDistance best_shift_distance(const SolutionState& state, const FrontProfile& profile,
                                    double a, double center_shift);

}  // namespace kpplab
