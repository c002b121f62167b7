// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "kpplab/reaction.hpp"

namespace kpplab {

struct Grid {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_points = 0;

    double dx() const { return (x_max - x_min) / (n_points - 1); }
    double x(int i) const { return x_min + dx() * i; }
    std::vector<double> nodes() const;

    /// Enforces the desk-scale constraints: span >= 20 L, dx <= L/32,
    /// n >= 641, and L/dx integral.
    void validate(double period) const;
};

/// Grid with x-spacing 1/cells_per_period and n chosen so L/dx is an integer.
Grid make_grid(double x_min, double x_max, double period, int cells_per_period);

struct SolutionState {
    double t = 0.0;
    std::vector<double> u;
    Grid grid;
};

enum class BoundaryLeft { DirichletP, NeumannZero };

struct SchemeConfig {
    double dt = 0.0;
    double theta = 1.0;  // implicitness of diffusion
    BoundaryLeft boundary_left = BoundaryLeft::NeumannZero;
    // right boundary is always Dirichlet 0
    bool monotone_mode = true;
    double u_cap = 0.0;        // clamp ceiling in monotone mode (max stationary bound)
    double left_value = 0.0;   // pinned value for DirichletP

    void validate(const Grid& grid) const;
};

/// Time stepper for du/dt = u_xx + f(x,u): theta-scheme diffusion
/// (tridiagonal solve) with the reaction evaluated explicitly at the
/// current iterate. Factorization and per-node reaction tables are
/// precomputed once per (grid, model, scheme).
class Stepper {
  public:
    Stepper(const Grid& grid, const ReactionModel& model, const SchemeConfig& scheme);

    void step(SolutionState& state) const;

    const SchemeConfig& scheme() const { return scheme_; }

  private:
    Grid grid_;
    SchemeConfig scheme_;
    // baked reaction: f_i(u) = a_i u (k_i - u) + pert_i u when logistic-like,
    // else generic per-node evaluation
    bool logistic_like_ = false;
    std::vector<double> a_, k_, pert_;
    const ReactionModel* model_ = nullptr;
    std::shared_ptr<const ReactionModel> model_owned_;
    // cached Thomas factorization of (I - theta dt D2)
    std::vector<double> diag_inv_, upper_scaled_, sub_;
    mutable std::vector<double> rhs_;

    double reaction(int i, double u) const;
};

void step(SolutionState& state, const ReactionModel& model, const SchemeConfig& scheme);

struct Probe {
    double interval = 0.0;
    std::function<void(const SolutionState&)> fn;
    bool at_start = true;  // also fire on the initial state
};

struct RunSummary {
    int steps = 0;
    double t_final = 0.0;
};

/// Repeated stepping with observer callbacks at configured intervals.
/// Deterministic given the configuration.
RunSummary run(SolutionState& state, const ReactionModel& model, const SchemeConfig& scheme,
               double t_end, std::vector<Probe> probes = {});

struct StationaryState {
    std::vector<double> values;  // on the grid
    Grid grid;
    bool periodic = false;
    std::optional<PeriodicField> cell;  // one mid-domain cell when periodic
    double sup_norm = 0.0;

    double at(double x) const;  // linear interpolation on the grid
};

/// Maximal stationary state by relaxation from the constant supersolution
/// 1.1 * sup{s : sup_x f(x,s) >= 0}, Neumann boundaries, iterated until
/// ||u_t||_inf < tol. The iterates must be non-increasing in t.
StationaryState stationary_upper(const ReactionModel& model, const Grid& grid, double tol = 1e-8);

// Initial data library
std::vector<double> init_bump(const Grid& grid, double a, double b, double height,
                              const SchemeConfig& scheme);
std::vector<double> init_exp_tail(const Grid& grid, const StationaryState& p, double amplitude,
                                  double decay_rate);
std::vector<double> init_heaviside(const Grid& grid, const StationaryState& p, double a);

}  // namespace kpplab
