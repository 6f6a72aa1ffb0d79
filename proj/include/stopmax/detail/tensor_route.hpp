#pragma once

#include <algorithm>
#include <cmath>

#include "stopmax/quadrature.hpp"

namespace stopmax {

namespace detail {

// Panels of at most `width` between consecutive breakpoints, after sorting and
// clipping the breakpoints to [a, b].
template <class F>
double integrate_between(const quad::GaussLegendre& rule, F&& f, double a, double b,
                         std::initializer_list<double> cuts, double width) {
    if (!(b > a)) return 0.0;
    double pts[8];
    int n = 0;
    pts[n++] = a;
    for (double c : cuts)
        if (c > a && c < b && n < 7) pts[n++] = c;
    pts[n++] = b;
    std::sort(pts, pts + n);
    return quad::integrate_panels(rule, f, std::span<const double>(pts, static_cast<std::size_t>(n)), width);
}

}  // namespace detail

template <class Phi>
double tensor_expectation(const ProblemSpec& spec, double x, double u, double y, double z, Phi&& phi,
                          int order) {
    if (!(u > 0.0)) throw DomainError("tensor_expectation: u must be > 0");
    require_level(x, "tensor_expectation: x");
    const double mu = spec.mu;
    const double su = std::sqrt(u);
    const double m_max = std::abs(mu) * u + 12.0 * su;
    const double norm = 0.79788456080286535588 / (u * su);
    const auto& rule = quad::gauss_legendre(order);
    const double width = 1.5 * su;

    // b = 2s - m, X = max(x, s) - b = max(x, s) - 2s + m.
    auto outer = [&](double s) {
        const double base = std::max(x, s) - 2.0 * s;
        const double m_lo = std::max(s, y - base);
        const double m_hi = std::min(m_max, z - base);
        auto inner = [&](double m) {
            const double b = 2.0 * s - m;
            return phi(base + m) * norm * m * std::exp(-m * m / (2.0 * u) + mu * (b - 0.5 * mu * u));
        };
        return detail::integrate_between(rule, inner, m_lo, m_hi, {}, width);
    };
    // the inner limits bend where they meet each other or the truncation
    return detail::integrate_between(rule, outer, 0.0, m_max,
                                     {x, x - y, x - z, 0.5 * (m_max - z + x), m_max - z}, width);
}

}  // namespace stopmax
