#include "stopmax/dp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stopmax/gain_model.hpp"
#include "stopmax/gauss_kernel.hpp"
#include "stopmax/quadrature.hpp"

namespace stopmax {

namespace {

struct SparseRow {
    int first = 0;
    std::vector<double> w;
};

// Row i holds E[psi_j(X^{x_i}_dt)] for the cardinal functions psi_j of piecewise cubic
// Lagrange interpolation (four nearest levels per cell); above the grid V is
// extended by the quadratic through the top three levels.
std::vector<SparseRow> transition(const ProblemSpec& spec, double dt, const std::vector<double>& x, int order) {
    const int m = static_cast<int>(x.size());
    const double dx = x[1] - x[0];
    const double reach = 12.0 * std::sqrt(dt) + std::abs(spec.mu) * dt;
    const auto& rule = quad::gauss_legendre(order);
    std::vector<SparseRow> rows(m);
    for (int i = 0; i < m; ++i) {
        const int lo_cell = std::max(0, static_cast<int>(std::floor((x[i] - reach) / dx)));
        const int hi_cell = std::min(m - 1, static_cast<int>(std::ceil((x[i] + reach) / dx)));
        SparseRow& r = rows[i];
        r.first = std::max(0, lo_cell - 1);
        const int last = std::min(m - 1, hi_cell + 1);
        r.w.assign(last - r.first + 1, 0.0);
        auto dens = [&](double w) { return gap_density(spec.mu, dt, x[i], w); };
        auto add_lagrange = [&](int first_node, int count, double a, double b) {
            const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
            for (int g = 0; g < rule.order(); ++g) {
                const double w = mid + half * rule.nodes[g];
                const double base = rule.weights[g] * half * dens(w);
                for (int q = 0; q < count; ++q) {
                    double l = 1.0;
                    for (int p = 0; p < count; ++p)
                        if (p != q) l *= (w - x[first_node + p]) / (x[first_node + q] - x[first_node + p]);
                    r.w[first_node + q - r.first] += base * l;
                }
            }
        };
        for (int c = lo_cell; c < hi_cell; ++c) add_lagrange(std::clamp(c - 1, 0, m - 4), 4, x[c], x[c + 1]);
        if (x[i] + reach > x[m - 1]) {
            const double top = x[m - 1];
            const int panels = std::max(1, static_cast<int>(std::ceil((x[i] + reach - top) / dx)));
            for (int p = 0; p < panels; ++p) add_lagrange(m - 3, 3, top + p * dx, top + (p + 1) * dx);
        }
    }
    return rows;
}

double crossing(double xa, double da, double xb, double db) {
    return xa + (xb - xa) * da / (da - db);
}

}  // namespace

double DpResult::value_at_zero(double x) const {
    if (x <= levels.front()) return value0.front();
    if (x >= levels.back()) return value0.back();
    const double pos = (x - levels.front()) / cell;
    const auto i = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * value0[i] + w * value0[i + 1];
}

DpResult solve_dp(const ProblemSpec& spec, const DpConfig& config) {
    spec.validate();
    if (config.n_steps < 1 || config.n_levels < 4) throw DomainError("solve_dp: grid too small");
    const double T = spec.horizon;
    const double x_max = config.x_max > 0.0 ? config.x_max : 4.0 * std::sqrt(T) + 2.0 * std::abs(spec.mu) * T;
    const int m = config.n_levels;
    const int n = config.n_steps;
    const double dt = T / n;

    DpResult res;
    res.cell = x_max / (m - 1);
    res.levels.resize(m);
    for (int i = 0; i < m; ++i) res.levels[i] = x_max * i / (m - 1);
    res.times.resize(n + 1);
    for (int k = 0; k <= n; ++k) res.times[k] = T * k / n;
    res.times[n] = T;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    res.lower_edge.assign(n + 1, nan);
    res.upper_edge.assign(n + 1, nan);

    const auto rows = transition(spec, dt, res.levels, config.quad_order);
    std::vector<double> v(m), cont(m), g(m);
    for (int i = 0; i < m; ++i) v[i] = res.levels[i] * res.levels[i];
    res.lower_edge[n] = 0.0;
    res.upper_edge[n] = std::numeric_limits<double>::infinity();

    for (int k = n - 1; k >= 0; --k) {
        const double t = res.times[k];
        for (int i = 0; i < m; ++i) {
            const SparseRow& r = rows[i];
            double s = 0.0;
            for (std::size_t j = 0; j < r.w.size(); ++j) s += r.w[j] * v[r.first + j];
            cont[i] = s;
            g[i] = gain(spec, t, res.levels[i]);
        }
        // d > 0 continues, d <= 0 stops.
        int first = -1, last = -1;
        for (int i = 0; i < m; ++i) {
            if (cont[i] - g[i] >= 0.0) {
                if (first < 0) first = i;
                last = i;
            }
        }
        if (first >= 0) {
            const auto& x = res.levels;
            res.lower_edge[k] = first == 0 ? 0.0 : crossing(x[first - 1], cont[first - 1] - g[first - 1], x[first], cont[first] - g[first]);
            res.upper_edge[k] = last == m - 1 ? std::numeric_limits<double>::infinity()
                                              : crossing(x[last], cont[last] - g[last], x[last + 1], cont[last + 1] - g[last + 1]);
        }
        for (int i = 0; i < m; ++i) v[i] = std::min(g[i], cont[i]);
    }
    res.value0 = v;
    return res;
}

}  // namespace stopmax
