// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <vector>

#include "kpplab/periodic_field.hpp"

namespace kpplab {

/// Principal (Perron) eigenpair of -phi'' + 2*lambda*phi' - r(x)*phi = mu*phi
/// with L-periodic boundary conditions, eigenfunction positive and
/// normalized to max = 1.
struct EigenPair {
    double lambda = 0.0;
    double mu = 0.0;
    PeriodicField phi;
    double residual = 0.0;  // ||A phi - mu phi||_inf on the discrete stencil
};

EigenPair principal_eigen(const PeriodicField& r, double lambda, int n_cell);

struct DispersionOptions {
    int n_cell = 128;
    double lambda_min_over_L = 1e-3;  // scan range [lambda_min, lambda_max] / L
    double lambda_max_over_L = 20.0;
    int scan_points = 48;
    double golden_tol = 1e-8;
};

/// Sampled dispersion curve c(lambda) = (lambda^2 - mu(lambda)) / lambda with
/// its minimum c* attained at lambda*.
class DispersionData {
  public:
    DispersionData(PeriodicField r, DispersionOptions opts);

    double mu_of(double lambda) const;  // memoized principal eigenvalue
    double c_of(double lambda) const { return (lambda * lambda - mu_of(lambda)) / lambda; }

    double c_star() const { return c_star_; }
    double lambda_star() const { return lambda_star_; }
    double mu_zero() const { return mu_zero_; }
    const std::vector<double>& lambda_grid() const { return lambda_grid_; }
    const std::vector<double>& mu_values() const { return mu_values_; }
    const std::vector<double>& c_values() const { return c_values_; }
    const PeriodicField& r() const { return r_; }
    int n_cell() const { return opts_.n_cell; }

    /// |2 lambda* - c* - mu'(lambda*)| with mu' by central difference.
    double tangency_residual() const;

  private:
    friend DispersionData minimal_speed(const PeriodicField&, double, DispersionOptions);
    PeriodicField r_;
    DispersionOptions opts_;
    double c_star_ = 0.0, lambda_star_ = 0.0, mu_zero_ = 0.0;
    std::vector<double> lambda_grid_, mu_values_, c_values_;
    mutable std::map<double, double> cache_;
};

/// Coarse scan of c(lambda) on a logarithmic grid, then golden-section
/// refinement of the minimum to tolerance tol (in lambda).
DispersionData minimal_speed(const PeriodicField& r, double tol = 1e-8,
                             DispersionOptions opts = {});

/// The two positive roots of lambda^2 - mu(lambda) - c*lambda = 0 for
/// c >= c*; the double root (lambda*, lambda*) at c = c*.
struct LambdaRoots {
    double minus = 0.0;  // lambda_c < lambda*
    double plus = 0.0;   // > lambda*
};
LambdaRoots lambda_roots(const DispersionData& disp, double c);

/// Least-squares fit of log(dc) against log(lambda* - lambda_c) over the
/// given speed offsets; slope N and intercept-derived prefactor K in
/// c - c* ~ K (lambda* - lambda_c)^N.
struct DegeneracyFit {
    double n_fit = 0.0;
    double k_fit = 0.0;
};
DegeneracyFit degeneracy_exponent(const DispersionData& disp, const std::vector<double>& offsets);

}  // namespace kpplab
