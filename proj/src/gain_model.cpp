#include "stopmax/gain_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stopmax/gauss_kernel.hpp"
#include "stopmax/normal.hpp"
#include "stopmax/quadrature.hpp"
#include "stopmax/roots.hpp"

namespace stopmax {

namespace {

double require_before_horizon(const ProblemSpec& spec, double t, const char* what) {
    const double tau = time_to_go(spec, t);
    if (!(tau > 0.0)) throw DomainError(std::string(what) + ": t must be < T");
    return tau;
}

}  // namespace

double gain(const ProblemSpec& spec, double t, double x) {
    const double tau = time_to_go(spec, t);
    require_level(x, "gain: x");
    if (tau == 0.0) return x * x;
    const double mu = spec.mu;
    const double s = std::sqrt(tau);
    const double bulk = std::max(x, std::max(mu, 0.0) * tau + 10.0 * s);
    const double z_max = bulk + 10.0;
    auto integrand = [&](double z) { return z * max_survival(mu, tau, z); };
    double tail = 0.0;
    // Most of the mass sits within a few sqrt(tau) of the mean of the maximum.
    const double split = std::min(bulk, x + 4.0 * s);
    if (split > x) tail += quad::integrate_adaptive(integrand, x, split, 5e-11).value;
    if (bulk > split) tail += quad::integrate_adaptive(integrand, split, bulk, 5e-11).value;
    tail += quad::integrate_adaptive(integrand, bulk, z_max, 1e-11).value;
    return x * x + 2.0 * tail;
}

double gain_t(const ProblemSpec& spec, double t, double x) {
    const double tau = require_before_horizon(spec, t, "gain_t");
    require_level(x, "gain_t: x");
    const double mu = spec.mu;
    const double s = std::sqrt(tau);
    const double a = (x - mu * tau) / s;
    return -2.0 * ((1.0 + mu * mu * tau) * std_normal_cdf(-a) + (x + mu * tau) / s * std_normal_pdf(a));
}

double gain_x(const ProblemSpec& spec, double t, double x) {
    const double tau = time_to_go(spec, t);
    require_level(x, "gain_x: x");
    if (x == 0.0) return 0.0;
    return 2.0 * x * max_cdf(spec, tau, x);
}

double gain_xx(const ProblemSpec& spec, double t, double x) {
    const double tau = time_to_go(spec, t);
    require_level(x, "gain_xx: x");
    if (tau == 0.0) return 2.0;
    const double mu = spec.mu;
    const double s = std::sqrt(tau);
    const double c = (-x - mu * tau) / s;
    // dF/dz = (phi(a) + e^{2 mu z} phi(c)) / s - 2 mu e^{2 mu z} Phi(c)
    const double a = (x - mu * tau) / s;
    const double mirror = std::exp(2.0 * mu * x - 0.5 * c * c) * 0.39894228040143267794;
    const double dF = (std_normal_pdf(a) + mirror) / s - 2.0 * mu * exp_times_cdf(2.0 * mu * x, c);
    return 2.0 * max_cdf(spec, tau, x) + 2.0 * x * dF;
}

double h_function(const ProblemSpec& spec, double t, double x) {
    const double tau = time_to_go(spec, t);
    require_level(x, "h_function: x");
    const double mu = spec.mu;
    if (tau == 0.0) return x > 0.0 ? 1.0 - 2.0 * mu * x : -1.0;
    const double s = std::sqrt(tau);
    const double a = (x - mu * tau) / s;
    const double c = (-x - mu * tau) / s;
    const double m2 = mu * mu * tau;
    return (2.0 * m2 - 2.0 * mu * x + 3.0) * std_normal_cdf(a) - 2.0 * mu * s * std_normal_pdf(a) -
           exp_times_cdf(2.0 * mu * x, c) - 2.0 * (1.0 + m2);
}

double h_time_derivative(const ProblemSpec& spec, double t, double x) {
    const double tau = require_before_horizon(spec, t, "h_time_derivative");
    require_level(x, "h_time_derivative: x");
    const double mu = spec.mu;
    const double s = std::sqrt(tau);
    const double a = (x - mu * tau) / s;
    return 2.0 * (x + mu * tau) / (tau * s) * std_normal_pdf(a) + 2.0 * mu * mu * std_normal_cdf(-a);
}

GammaPoint gamma_at(const ProblemSpec& spec, double t) {
    const double tau = time_to_go(spec, t);
    const double mu = spec.mu;
    GammaPoint p;
    if (tau == 0.0) {
        p.exists = true;
        p.gamma1 = 0.0;
        p.gamma2 = mu > 0.0 ? 0.5 / mu : std::numeric_limits<double>::infinity();
        return p;
    }
    auto h = [&](double x) { return h_function(spec, t, x); };
    const double x_tol = 1e-13;
    const double f_tol = 1e-10;

    if (mu <= 0.0) {
        // H(t, 0) < 0 and H grows like 1 - 2 mu x, so one sign change.
        double hi = std::sqrt(tau);
        double fhi = h(hi);
        while (fhi <= 0.0) {
            hi *= 2.0;
            fhi = h(hi);
            if (hi > 1e6) throw ToleranceError("gamma_at: no sign change of H");
        }
        auto r = roots::brent(h, 0.0, hi, h(0.0), fhi, x_tol, f_tol);
        if (!r.converged) throw ToleranceError("gamma_at: root of H did not converge");
        p.exists = true;
        p.gamma1 = r.x;
        p.gamma2 = std::numeric_limits<double>::infinity();
        return p;
    }

    const double x_hi = 2.0 * std::max(1.0 / mu, 4.0 * std::sqrt(spec.horizon));
    // Coarse scan guards the golden-section search against a flat start.
    constexpr int kScan = 64;
    int best = 0;
    double best_h = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kScan; ++i) {
        const double hv = h(x_hi * i / kScan);
        if (hv > best_h) {
            best_h = hv;
            best = i;
        }
    }
    const double lo = x_hi * std::max(0, best - 1) / kScan;
    const double hi = x_hi * std::min(kScan, best + 1) / kScan;
    auto [x_mid, h_mid] = roots::golden_section_max(h, lo, hi, 1e-10);
    if (h_mid < 0.0) return p;
    const double h0 = h(0.0);
    const double hx = h(x_hi);
    if (h_mid == 0.0) {
        p.exists = true;
        p.gamma1 = p.gamma2 = x_mid;
        return p;
    }
    if (hx >= 0.0) throw ToleranceError("gamma_at: H does not turn negative below the gamma2 cap");
    auto r1 = roots::brent(h, 0.0, x_mid, h0, h_mid, x_tol, f_tol);
    auto r2 = roots::brent(h, x_mid, x_hi, h_mid, hx, x_tol, f_tol);
    if (!r1.converged || !r2.converged) throw ToleranceError("gamma_at: root of H did not converge");
    p.exists = true;
    p.gamma1 = r1.x;
    p.gamma2 = r2.x;
    return p;
}

double locate_u_star(const ProblemSpec& spec, double t_tol) {
    if (spec.mu <= 0.0) return 0.0;
    if (gamma_at(spec, 0.0).exists) return 0.0;
    // H increases in t when mu > 0, so existence is monotone in t.
    double lo = 0.0;
    double hi = spec.horizon;
    while (hi - lo > t_tol) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_at(spec, mid).exists) hi = mid; else lo = mid;
    }
    return hi;
}

GammaCurves gamma_curves(const ProblemSpec& spec, std::span<const double> grid) {
    spec.validate();
    if (grid.size() < 2) throw DomainError("gamma_curves: grid needs at least two points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw DomainError("gamma_curves: grid must be strictly increasing");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    GammaCurves g;
    g.times.assign(grid.begin(), grid.end());
    g.gamma1.assign(grid.size(), nan);
    g.gamma2.assign(grid.size(), nan);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const GammaPoint p = gamma_at(spec, grid[i]);
        if (!p.exists) continue;
        g.gamma1[i] = p.gamma1;
        g.gamma2[i] = p.gamma2;
    }
    g.u_star = locate_u_star(spec);
    if (spec.mu <= 0.0) {
        const auto it = std::max_element(g.gamma1.begin(), g.gamma1.end());
        g.w_star = g.times[static_cast<std::size_t>(it - g.gamma1.begin())];
    }
    return g;
}

}  // namespace stopmax
