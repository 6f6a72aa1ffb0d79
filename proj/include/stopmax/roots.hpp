#pragma once

#include <cmath>
#include <utility>

#include "stopmax/errors.hpp"

namespace stopmax::roots {

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Brent-Dekker root finder (inverse quadratic / secant steps guarded by bisection).
/// Requires f(a) and f(b) of opposite sign or one of them zero; stops when the
/// bracket is narrower than x_tol and |f| <= f_tol, or when |f| hits zero.
template <class F>
RootResult brent(F&& f, double a, double b, double fa, double fb, double x_tol, double f_tol,
                 int max_evaluations = 200) {
    RootResult r;
    if (fa == 0.0) return {a, 0.0, 0, true};
    if (fb == 0.0) return {b, 0.0, 0, true};
    if ((fa > 0.0) == (fb > 0.0)) throw BracketError("brent: no sign change on bracket");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (r.evaluations = 0; r.evaluations < max_evaluations;) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * 1e-16 * std::abs(b) + 0.5 * x_tol;
        const double m = 0.5 * (c - b);
        if ((std::abs(m) <= tol && std::abs(fb) <= f_tol) || fb == 0.0 ||
            std::abs(m) <= 4e-16 * std::max(1.0, std::abs(b))) {
            r.x = b;
            r.fx = fb;
            r.converged = std::abs(fb) <= f_tol || std::abs(m) <= tol;
            return r;
        }
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double rr = fb / fc;
                p = s * (2.0 * m * qa * (qa - rr) - (b - a) * (rr - 1.0));
                q = (qa - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        ++r.evaluations;
    }
    r.x = b;
    r.fx = fb;
    r.converged = false;
    return r;
}

template <class F>
RootResult brent(F&& f, double a, double b, double x_tol, double f_tol, int max_evaluations = 200) {
    const double fa = f(a);
    const double fb = f(b);
    return brent(f, a, b, fa, fb, x_tol, f_tol, max_evaluations);
}

/// Plain bisection; same bracket contract as brent.
template <class F>
RootResult bisect(F&& f, double a, double b, double x_tol, double f_tol, int max_evaluations = 200) {
    double fa = f(a);
    const double fb = f(b);
    if (fa == 0.0) return {a, 0.0, 2, true};
    if (fb == 0.0) return {b, 0.0, 2, true};
    if ((fa > 0.0) == (fb > 0.0)) throw BracketError("bisect: no sign change on bracket");
    RootResult r{0.0, 0.0, 2, false};
    while (r.evaluations < max_evaluations) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        ++r.evaluations;
        r.x = m;
        r.fx = fm;
        if (std::abs(fm) <= f_tol && 0.5 * (b - a) <= x_tol) {
            r.converged = true;
            return r;
        }
        if (fm == 0.0 || 0.5 * std::abs(b - a) < 1e-15 * std::max(1.0, std::abs(m))) {
            r.converged = std::abs(fm) <= f_tol;
            return r;
        }
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return r;
}

/// Golden-section search for the maximiser of a unimodal f on [a, b].
template <class F>
std::pair<double, double> golden_section_max(F&& f, double a, double b, double x_tol) {
    constexpr double g = 0.61803398874989484820;
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > x_tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace stopmax::roots
