// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "kpplab/floquet.hpp"
#include "kpplab/solver.hpp"

namespace kpplab {

/// One time-period of a pulsating traveling wave, stored as n_phase + 1
/// fixed-frame snapshots spanning [0, T], T = L/c. The anchor (t_anchor,
/// k_anchor cells) is chosen so that value(0, 0) = p(0)/2; queries outside
/// the stored period reduce through u(t+T, x) = u(t, x-L), and positions
/// beyond the stored window extend by p on the left and 0 on the right.
struct FrontProfile {
    double c = 0.0;
    double T = 0.0;
    double L = 0.0;
    Grid grid;
    int n_phase = 16;
    std::vector<std::vector<double>> phases;  // n_phase + 1 snapshots, spacing T/n_phase
    double t_anchor = 0.0;                    // in [0, T)
    int k_anchor = 0;                         // anchor station x = k_anchor * L
    StationaryState p;
    double p_norm = 0.0;
    double lambda_c = 0.0;      // decay rate governing the right tail
    PeriodicField phi_c = PeriodicField::constant(1.0, 1.0);  // eigenfunction at lambda_c
    double lambda_fit = 0.0;    // tail fit results
    double b_c = 0.0;
    double construction_residual = 0.0;  // shape-periodicity residual at convergence
    double measured_speed = 0.0;         // crossing-speed estimate from the run
    double horizon_used = 0.0;

    /// U(t, x) in anchored coordinates; linear in time between phases.
    double value(double t, double x) const;
    /// Grid field at anchored time t (reduced mod T).
    std::vector<double> field_at(double t) const;
};

struct FrontOptions {
    int n_phase = 16;
    double tol_front = 1e-3;  // residual tolerance, relative to ||p||_inf
    int cells_per_period_eig = 128;
    double heaviside_offset = 10.0;  // Heaviside jump at x_min + offset * L
};

/// Builds the pulsating wave with speed c >= c* from a long Cauchy run:
/// Heaviside data at c = c*, the decaying datum min(p, phi_c e^{-lambda_c x})
/// at c > c*. Runs until ||u(t+T,.) - u(t,.-L)||_inf <= tol * ||p||_inf over
/// one full period.
FrontProfile compute_front(const ReactionModel& model, double c, const DispersionData& disp,
                           const Grid& grid, double horizon, FrontOptions opts = {});

/// Re-evolves phase 0 for one period and returns
/// sup_x |u(T, x) - u(0, x - L)| over the window interior.
double periodicity_residual(const FrontProfile& profile, const ReactionModel& model);

struct TailFit {
    double lambda_fit = 0.0;
    double b_c = 0.0;
    double log_residual = 0.0;  // rms misfit in log scale
};

/// Divides the phase-0 profile by phi_c and fits log of the quotient
/// against z on [z_lo, z_hi] (z measured from the anchor station).
TailFit tail_fit(const FrontProfile& profile, double z_lo, double z_hi);

}  // namespace kpplab
