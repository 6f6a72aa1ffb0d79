#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace stopmax::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order() const { return static_cast<int>(nodes.size()); }
};

/// Rule of the given order; rules are built once and cached for the process lifetime.
const GaussLegendre& gauss_legendre(int order);

/// Integral of f over [a, b] with one application of the rule.
template <class F>
double integrate_rule(const GaussLegendre& rule, F&& f, double a, double b) {
    if (!(b > a)) return 0.0;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (int i = 0; i < rule.order(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

/// Composite rule over consecutive breakpoints; each [bp[i], bp[i+1]] is split into
/// equal panels no wider than max_width.
template <class F>
double integrate_panels(const GaussLegendre& rule, F&& f, std::span<const double> breakpoints,
                        double max_width) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i];
        const double b = breakpoints[i + 1];
        if (!(b > a)) continue;
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
        const double w = (b - a) / panels;
        for (int p = 0; p < panels; ++p) total += integrate_rule(rule, f, a + p * w, a + (p + 1) * w);
    }
    return total;
}

struct AdaptiveResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

namespace detail {
template <class F>
void adaptive_step(const GaussLegendre& rule, F& f, double a, double b, double whole, double tol,
                   int depth, AdaptiveResult& out) {
    const double mid = 0.5 * (a + b);
    const double left = integrate_rule(rule, f, a, mid);
    const double right = integrate_rule(rule, f, mid, b);
    const double err = std::abs(left + right - whole);
    if (err <= tol || depth <= 0) {
        if (err > tol) out.converged = false;
        out.value += left + right;
        out.error_estimate += err;
        return;
    }
    adaptive_step(rule, f, a, mid, left, 0.5 * tol, depth - 1, out);
    adaptive_step(rule, f, mid, b, right, 0.5 * tol, depth - 1, out);
}
}  // namespace detail

/// Adaptive bisection driven by the difference between one panel and its two halves.
template <class F>
AdaptiveResult integrate_adaptive(F&& f, double a, double b, double abs_tol, int order = 16,
                                  int max_depth = 30) {
    AdaptiveResult out;
    if (!(b > a)) return out;
    const auto& rule = gauss_legendre(order);
    const double whole = integrate_rule(rule, f, a, b);
    detail::adaptive_step(rule, f, a, b, whole, abs_tol, max_depth, out);
    return out;
}

}  // namespace stopmax::quad
