// SPDX-License-Identifier: Apache-2.0
#include "kpplab/floquet.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kpplab {

namespace {

// Thomas solve with constant off-diagonals; the shifted systems below are
// strictly diagonally dominant, so no pivoting is needed.
std::vector<double> thomas(std::vector<double> d, double sub, double sup,
                           std::vector<double> rhs) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) {
        double m = sub / d[i - 1];
        d[i] -= m * sup;
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup * rhs[i + 1]) / d[i];
    return rhs;
}

// cyclic tridiagonal system (corners A[0][n-1] = sub, A[n-1][0] = sup) by
// Sherman-Morrison over the Thomas solve
std::vector<double> cyclic_solve(const std::vector<double>& d, double sub, double sup,
                                 std::vector<double> rhs) {
    const std::size_t n = d.size();
    const double gamma = -d[0];
    std::vector<double> dd = d;
    dd[0] -= gamma;
    dd[n - 1] -= sub * sup / gamma;

    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = sup;
    std::vector<double> x = thomas(dd, sub, sup, std::move(rhs));
    std::vector<double> z = thomas(dd, sub, sup, std::move(u));
    double vx = x[0] + sub / gamma * x[n - 1];
    double vz = z[0] + sub / gamma * z[n - 1];
    double factor = vx / (1.0 + vz);
    for (std::size_t i = 0; i < n; ++i) x[i] -= factor * z[i];
    return x;
}

struct Operator {
    std::vector<double> diag;
    double sub = 0.0, sup = 0.0;

    void apply(const std::vector<double>& v, std::vector<double>& out) const {
        const std::size_t n = diag.size();
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t ip = i + 1 == n ? 0 : i + 1;
            std::size_t im = i == 0 ? n - 1 : i - 1;
            out[i] = diag[i] * v[i] + sup * v[ip] + sub * v[im];
        }
    }
    void apply_adjoint(const std::vector<double>& v, std::vector<double>& out) const {
        const std::size_t n = diag.size();
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t ip = i + 1 == n ? 0 : i + 1;
            std::size_t im = i == 0 ? n - 1 : i - 1;
            out[i] = diag[i] * v[i] + sub * v[ip] + sup * v[im];
        }
    }
};

// shifted inverse power iteration toward the Perron vector; adjoint flag
// swaps sub/sup (the transpose system)
std::vector<double> perron_vector(const Operator& op, double sigma, bool adjoint, int max_it) {
    const std::size_t n = op.diag.size();
    std::vector<double> ds(n);
    for (std::size_t i = 0; i < n; ++i) ds[i] = op.diag[i] - sigma;
    const double sub = adjoint ? op.sup : op.sub;
    const double sup = adjoint ? op.sub : op.sup;

    std::vector<double> v(n, 1.0);
    for (int it = 0; it < max_it; ++it) {
        std::vector<double> w = cyclic_solve(ds, sub, sup, v);
        double wmax = 0.0;
        for (double x : w) wmax = std::max(wmax, std::abs(x));
        if (!(wmax > 0.0) || !std::isfinite(wmax)) break;
        for (double& x : w) x /= wmax;
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(w[i] - v[i]));
        v = std::move(w);
        if (delta < 1e-15) break;
    }
    return v;
}

}  // namespace

EigenPair principal_eigen(const PeriodicField& r, double lambda, int n_cell) {
    if (n_cell < 32) throw std::invalid_argument("principal_eigen: n_cell must be >= 32");
    const auto n = static_cast<std::size_t>(n_cell);
    const double L = r.period();
    const double h = L / n_cell;

    Operator op;
    op.diag.resize(n);
    op.sup = -1.0 / (h * h) + lambda / h;  // -phi'' and 2*lambda*phi'
    op.sub = -1.0 / (h * h) - lambda / h;
    double rmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double ri = r(h * static_cast<double>(i));
        op.diag[i] = 2.0 / (h * h) - ri;
        rmax = std::max(rmax, ri);
    }
    // mu >= -max r (evaluate at the eigenfunction's maximum), so this shift
    // lies strictly below the principal eigenvalue; the eigenvalue of minimal
    // real part is then the unique one nearest the shift, and the resolvent
    // of an M-matrix keeps the iterates positive (Perron structure)
    const double sigma = -rmax - 1.0;

    std::vector<double> v = perron_vector(op, sigma, false, 1000);
    std::vector<double> w = perron_vector(op, sigma, true, 1000);

    // two-sided Rayleigh quotient: first-order error in the eigenvector
    // cancels against the left eigenvector
    std::vector<double> av(n);
    op.apply(v, av);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += w[i] * av[i];
        den += w[i] * v[i];
    }
    if (den == 0.0 || !std::isfinite(num / den))
        throw std::runtime_error("principal_eigen: no Perron pair at requested resolution");
    const double mu = num / den;

    double vmax = 0.0, vmin = std::numeric_limits<double>::infinity();
    for (double x : v) {
        vmax = std::max(vmax, x);
        vmin = std::min(vmin, x);
    }
    if (!(vmin > 0.0) || !(vmax > 0.0))
        throw std::runtime_error("principal_eigen: no Perron pair at requested resolution");

    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = v[i] / vmax;

    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        resid = std::max(resid, std::abs(av[i] - mu * v[i]) / vmax);
    const double scale = 2.0 / (h * h) + std::abs(rmax);
    if (resid > 1e-8 * scale)
        throw std::runtime_error("principal_eigen: no Perron pair at requested resolution");

    return EigenPair{lambda, mu, PeriodicField(L, std::move(phi), 3), resid};
}

DispersionData::DispersionData(PeriodicField r, DispersionOptions opts)
    : r_(std::move(r)), opts_(opts) {}

double DispersionData::mu_of(double lambda) const {
    auto it = cache_.find(lambda);
    if (it != cache_.end()) return it->second;
    double mu = principal_eigen(r_, lambda, opts_.n_cell).mu;
    cache_.emplace(lambda, mu);
    return mu;
}

double DispersionData::tangency_residual() const {
    const double h = 1e-3 * lambda_star_;
    double dmu = (mu_of(lambda_star_ + h) - mu_of(lambda_star_ - h)) / (2.0 * h);
    return std::abs(2.0 * lambda_star_ - c_star_ - dmu);
}

DispersionData minimal_speed(const PeriodicField& r, double tol, DispersionOptions opts) {
    opts.golden_tol = tol;
    DispersionData d(r, opts);
    d.mu_zero_ = d.mu_of(0.0);
    if (d.mu_zero_ >= 0.0) throw std::runtime_error("minimal_speed: zero not linearly unstable");

    const double L = r.period();
    const double lo = opts.lambda_min_over_L / L;
    const double hi = opts.lambda_max_over_L / L;
    const int m = opts.scan_points;
    d.lambda_grid_.resize(m);
    d.mu_values_.resize(m);
    d.c_values_.resize(m);
    int imin = -1;
    double cmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        double lam = lo * std::pow(hi / lo, static_cast<double>(i) / (m - 1));
        d.lambda_grid_[i] = lam;
        d.mu_values_[i] = d.mu_of(lam);
        d.c_values_[i] = (lam * lam - d.mu_values_[i]) / lam;
        if (d.c_values_[i] < cmin) {
            cmin = d.c_values_[i];
            imin = i;
        }
    }
    if (imin <= 0 || imin >= m - 1)
        throw std::runtime_error("minimal_speed: no interior minimum of c(lambda) in scan range [" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + "]");

    // Golden-section refinement on the bracketing triple.
    double a = d.lambda_grid_[imin - 1], b = d.lambda_grid_[imin + 1];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = d.c_of(x1), f2 = d.c_of(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = d.c_of(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = d.c_of(x2);
        }
    }
    double lam = f1 < f2 ? x1 : x2;

    // golden section on the flat minimum leaves O(sqrt(noise)) error in
    // lambda*; polish it as the root of F = lambda^2 + mu - lambda mu',
    // the stationarity condition of c(lambda)
    auto dmu = [&](double x) {
        double h = 1e-2 * x;
        double d1 = (d.mu_of(x + h) - d.mu_of(x - h)) / (2.0 * h);
        double d2 = (d.mu_of(x + 0.5 * h) - d.mu_of(x - 0.5 * h)) / h;
        return (4.0 * d2 - d1) / 3.0;
    };
    auto F = [&](double x) { return x * x + d.mu_of(x) - x * dmu(x); };
    double fa = 0.0, fb = 0.0, a2 = lam, b2 = lam;
    double step = 5e-3 * lam;
    for (int k = 0; k < 12; ++k) {
        a2 = std::max(lo, lam - step);
        b2 = std::min(hi, lam + step);
        fa = F(a2);
        fb = F(b2);
        if (fa * fb <= 0.0) break;
        step *= 2.0;
    }
    if (fa * fb <= 0.0) {
        for (int it = 0; it < 100 && b2 - a2 > 1e-12 * lam; ++it) {
            double mid = 0.5 * (a2 + b2);
            double fm = F(mid);
            if (fm == 0.0) {
                a2 = b2 = mid;
                break;
            }
            if ((fm < 0.0) == (fa < 0.0)) {
                a2 = mid;
                fa = fm;
            } else {
                b2 = mid;
            }
        }
        lam = 0.5 * (a2 + b2);
    }
    d.lambda_star_ = lam;
    d.c_star_ = d.c_of(lam);
    return d;
}

LambdaRoots lambda_roots(const DispersionData& disp, double c) {
    const double c_star = disp.c_star();
    const double lam_star = disp.lambda_star();
    if (c < c_star) throw std::runtime_error("lambda_roots: subcritical speed has no real decay rates");
    if (c == c_star) return {lam_star, lam_star};

    auto g = [&](double lam) { return lam * lam - disp.mu_of(lam) - c * lam; };
    const double gtol = 1e-10 * std::max(1.0, c * c);

    auto bisect = [&](double a, double b) {
        double ga = g(a), gb = g(b);
        if (ga * gb > 0.0) throw std::runtime_error("lambda_roots: bracket failure");
        double mid = 0.5 * (a + b);
        for (int it = 0; it < 100; ++it) {
            mid = 0.5 * (a + b);
            if (b - a < 1e-14 * std::max(1.0, lam_star)) break;
            double gm = g(mid);
            if (gm == 0.0) break;
            if ((gm < 0.0) == (ga < 0.0)) {
                a = mid;
                ga = gm;
            } else {
                b = mid;
            }
        }
        if (std::abs(g(mid)) > gtol) throw std::runtime_error("lambda_roots: residual above tolerance");
        return mid;
    };

    // g > 0 near 0+ (since mu(0) < 0) and g(lambda*) = lambda*(c* - c) < 0.
    const double L = disp.r().period();
    double left_lo = 1e-8 / L;
    double minus = bisect(left_lo, lam_star);

    double hi = lam_star;
    double span = std::max(1.0 / L, lam_star);
    while (g(hi) < 0.0) {
        hi += span;
        if (hi > 1e4 / L) throw std::runtime_error("lambda_roots: no upper root found");
    }
    double plus = bisect(lam_star, hi);
    return {minus, plus};
}

DegeneracyFit degeneracy_exponent(const DispersionData& disp, const std::vector<double>& offsets) {
    if (offsets.size() < 3) throw std::invalid_argument("degeneracy_exponent: need >= 3 offsets");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double dc : offsets) {
        if (!(dc > 0.0)) throw std::invalid_argument("degeneracy_exponent: offsets must be positive");
        if (dc >= disp.c_star() / 2.0)
            throw std::invalid_argument("degeneracy_exponent: offsets must be < c*/2");
        lo = std::min(lo, dc);
        hi = std::max(hi, dc);
    }
    if (hi < 100.0 * lo)
        throw std::invalid_argument("degeneracy_exponent: offsets must span at least two decades");

    std::vector<double> lx, ly;
    for (double dc : offsets) {
        double lam_c = lambda_roots(disp, disp.c_star() + dc).minus;
        double gap = disp.lambda_star() - lam_c;
        if (gap <= 0.0) continue;
        lx.push_back(std::log(gap));
        ly.push_back(std::log(dc));
    }
    if (lx.size() < 3) throw std::runtime_error("degeneracy_exponent: fewer than 3 usable points");

    double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    return {slope, std::exp(intercept)};
}

}  // namespace kpplab
