// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "kpplab/periodic_field.hpp"

namespace kpplab {

/// f(x,u) = mu_hat(x) * u * (kappa(x) - u).
struct PeriodicLogistic {
    PeriodicField mu_hat;
    PeriodicField kappa;
};

/// f tabulated on an (x mod L, u) grid, bilinear interpolation.
/// values[i * nu + j] = f(x_i, u_j), x_i = i * L / nx, u_j = j * u_max / (nu - 1).
struct GeneralPeriodic {
    double period;
    int nx;
    int nu;
    double u_max;
    std::vector<double> values;
};

class ReactionModel;

/// f(x,u) = base(x,u) + C * exp(-rho * max(x,0)) * u.
struct CloseToPeriodic {
    std::shared_ptr<const ReactionModel> base;
    double amplitude;   // C >= 0
    double decay_rate;  // rho > 0
};

struct KppReport {
    std::vector<double> gaps;  // min over sampled x of f/s1 - f/s2 per adjacent pair
    bool pass = false;
};

class ReactionModel {
  public:
    explicit ReactionModel(PeriodicLogistic m);
    explicit ReactionModel(GeneralPeriodic m);
    explicit ReactionModel(CloseToPeriodic m);

    double f(double x, double u) const;
    /// r(x) = d/du f(x, 0). Exact for logistic; Richardson-extrapolated
    /// one-sided difference for tabulated models.
    double linearization(double x) const;

    double period() const;
    /// True when f is x-periodic (always for the first two variants; for
    /// CloseToPeriodic only when the amplitude vanishes).
    bool periodic() const;
    /// The periodic problem this model limits to as x -> +infinity
    /// (the model itself unless it carries a perturbation).
    const ReactionModel& limiting() const;

    bool is_logistic() const { return std::holds_alternative<PeriodicLogistic>(v_); }
    bool is_close_to_periodic() const { return std::holds_alternative<CloseToPeriodic>(v_); }
    const PeriodicLogistic* as_logistic() const { return std::get_if<PeriodicLogistic>(&v_); }
    const CloseToPeriodic* as_close_to_periodic() const { return std::get_if<CloseToPeriodic>(&v_); }

    /// Largest density at which the reaction is still nonnegative somewhere;
    /// densities above it decay everywhere.
    double saturation_density() const;

    PeriodicField linearization_field(int n_samples = 256) const;

    KppReport check_kpp(const std::vector<double>& s_grid, int x_resolution) const;

  private:
    std::variant<PeriodicLogistic, GeneralPeriodic, CloseToPeriodic> v_;
};

ReactionModel make_logistic(PeriodicField mu_hat, PeriodicField kappa);
ReactionModel make_close_to_periodic(ReactionModel base, double amplitude, double decay_rate);
/// Tabulates an existing model onto an (x, u) grid.
ReactionModel tabulate(const ReactionModel& m, int nx, int nu, double u_max);

}  // namespace kpplab
