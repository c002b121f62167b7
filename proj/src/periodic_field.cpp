// SPDX-License-Identifier: Apache-2.0
#include "kpplab/periodic_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kpplab {

PeriodicField::PeriodicField(double period, std::vector<double> samples, int interp_order)
    : period_(period), samples_(std::move(samples)), order_(interp_order) {
    if (!(period_ > 0.0)) throw std::invalid_argument("PeriodicField: period must be > 0");
    if (samples_.size() < 2) throw std::invalid_argument("PeriodicField: need at least 2 samples");
    if (order_ != 1 && order_ != 3)
        throw std::invalid_argument("PeriodicField: interpolation order must be 1 or 3");
    for (double s : samples_)
        if (!std::isfinite(s)) throw std::invalid_argument("PeriodicField: non-finite sample");
}

PeriodicField PeriodicField::constant(double value, double period) {
    return PeriodicField(period, std::vector<double>{value, value}, 1);
}

PeriodicField PeriodicField::from_function(const std::function<double(double)>& f,
                                           double period, int n_samples, int interp_order) {
    std::vector<double> s(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) s[static_cast<std::size_t>(i)] = f(period * i / n_samples);
    return PeriodicField(period, std::move(s), interp_order);
}

PeriodicField PeriodicField::from_fourier(const std::vector<double>& coeffs, double period,
                                          int n_samples, int interp_order) {
    if (coeffs.empty()) throw std::invalid_argument("PeriodicField: empty Fourier coefficient list");
    auto f = [&](double x) {
        double v = coeffs[0];
        for (std::size_t k = 1; 2 * k - 1 < coeffs.size(); ++k) {
            double w = 2.0 * std::numbers::pi * static_cast<double>(k) * x / period;
            v += coeffs[2 * k - 1] * std::cos(w);
            if (2 * k < coeffs.size()) v += coeffs[2 * k] * std::sin(w);
        }
        return v;
    };
    return from_function(f, period, n_samples, interp_order);
}

double PeriodicField::operator()(double x) const {
    const auto n = samples_.size();
    // Reduce to one cell; fmod is exact, so equal reduced arguments give
    // bit-identical results across periods.
    double r = std::fmod(x, period_);
    if (r < 0.0) r += period_;
    if (r >= period_) r = 0.0;
    double t = r / period_ * static_cast<double>(n);
    auto i = static_cast<std::size_t>(t);
    if (i >= n) i = n - 1;
    double frac = t - static_cast<double>(i);
    auto wrap = [n](std::ptrdiff_t j) { return static_cast<std::size_t>(((j % static_cast<std::ptrdiff_t>(n)) + static_cast<std::ptrdiff_t>(n)) % static_cast<std::ptrdiff_t>(n)); };
    if (order_ == 1) {
        double a = samples_[i], b = samples_[wrap(static_cast<std::ptrdiff_t>(i) + 1)];
        return a + frac * (b - a);
    }
    // Catmull-Rom through the four surrounding samples.
    double p0 = samples_[wrap(static_cast<std::ptrdiff_t>(i) - 1)];
    double p1 = samples_[i];
    double p2 = samples_[wrap(static_cast<std::ptrdiff_t>(i) + 1)];
    double p3 = samples_[wrap(static_cast<std::ptrdiff_t>(i) + 2)];
    double t2 = frac * frac, t3 = t2 * frac;
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * frac + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
}

double PeriodicField::min() const { return *std::min_element(samples_.begin(), samples_.end()); }
double PeriodicField::max() const { return *std::max_element(samples_.begin(), samples_.end()); }

}  // namespace kpplab
