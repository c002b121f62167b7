// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

namespace kpplab {

/// An L-periodic real function of x, sampled at uniform spacing on one cell.
/// Evaluation wraps by sample index, so field(x + L) == field(x) holds exactly
/// whenever x + L is exactly representable.
class PeriodicField {
  public:
    /// interp_order: 1 = piecewise linear, 3 = cubic (Catmull-Rom).
    PeriodicField(double period, std::vector<double> samples, int interp_order = 3);

    static PeriodicField constant(double value, double period);
    static PeriodicField from_function(const std::function<double(double)>& f,
                                       double period, int n_samples,
                                       int interp_order = 3);
    /// coeffs = {a0, a1, b1, a2, b2, ...} for a0 + sum_k a_k cos(2 pi k x / L)
    /// + b_k sin(2 pi k x / L).
    static PeriodicField from_fourier(const std::vector<double>& coeffs,
                                      double period, int n_samples = 256,
                                      int interp_order = 3);

    double operator()(double x) const;

    double period() const { return period_; }
    int interp_order() const { return order_; }
    const std::vector<double>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }

    double min() const;
    double max() const;

  private:
    double period_;
    std::vector<double> samples_;
    int order_;
};

}  // namespace kpplab
