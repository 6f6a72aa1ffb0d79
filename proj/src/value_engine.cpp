#include "stopmax/value_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stopmax/expectation_kernels.hpp"
#include "stopmax/gain_model.hpp"

namespace stopmax {

namespace {

void require_same_problem(const ProblemSpec& spec, const BoundaryTable& table) {
    if (!(spec == table.spec)) throw SpecMismatchError("boundary table was solved for a different problem");
}

double edge_weight(const BoundaryTable& table, double t, double x) {
    const auto band = table.band_at(t);
    if (!band) return 0.0;
    const double tol = 1e-10 * (1.0 + x);
    if (std::abs(x - band->lo) <= tol || (std::isfinite(band->hi) && std::abs(x - band->hi) <= tol)) return 0.5;
    return (x > band->lo && x < band->hi) ? 1.0 : 0.0;
}

}  // namespace

double represent_value(const BoundaryTable& table, double t, double x, EdgeRule edge) {
    const ProblemSpec& spec = table.spec;
    const double tau = time_to_go(spec, t);
    require_level(x, "value: x");
    if (tau == 0.0) return x * x;

    const KernelOptions opt = table.config.kernel_options();
    const int n = static_cast<int>(table.size()) - 1;
    const double h = table.step();
    // First grid time strictly after t.
    int j0 = static_cast<int>(std::floor(t / h * (1.0 + 1e-14))) + 1;
    if (j0 <= n && table.times[j0] - t <= 1e-12 * spec.horizon) ++j0;
    j0 = std::min(j0, n);

    // Trapezoid nodes s_0 = t < t_{j0} < ... < t_n = T.
    auto node = [&](int j) { return j < j0 ? t : table.times[j]; };
    double integral = 0.0;
    const double w0 = 0.5 * (table.times[j0] - t);
    const double ind = edge == EdgeRule::automatic ? edge_weight(table, t, x) : 0.0;
    if (ind > 0.0) integral += w0 * ind * h_function(spec, t, x);
    for (int j = j0; j <= n; ++j) {
        if (!table.has_band(static_cast<std::size_t>(j))) continue;
        const double prev = node(j - 1);
        const double next = j < n ? table.times[j + 1] : table.times[n];
        const double w = 0.5 * (next - prev);
        integral += w * kernel_band(spec, t, x, table.times[j] - t, table.b1[j], table.b2[j], opt);
    }
    return kernel_J(spec, t, x, opt) - integral;
}

ValueResult value_at(const ProblemSpec& spec, const BoundaryTable& table, double t, double x) {
    require_same_problem(spec, table);
    ValueResult r;
    r.g = gain(spec, t, x);
    r.v_raw = represent_value(table, t, x);
    r.v = std::min(r.v_raw, r.g);
    r.region = (r.g - r.v <= kClassificationTol * (1.0 + r.g)) ? Region::stopping : Region::continuation;
    return r;
}

DiagnosticReport diagnostics(const ProblemSpec& spec, const BoundaryTable& table, std::span<const double> probe_times,
                             std::span<const double> probe_levels, double fd_step) {
    require_same_problem(spec, table);
    DiagnosticReport rep;
    const double d = fd_step;
    const double near = 5.0 * table.step();
    for (double t : probe_times) {
        if (!(t >= 0.0 && t < spec.horizon)) continue;
        const bool near_T = spec.horizon - t < near;
        auto v = [&](double x) { return represent_value(table, t, x, EdgeRule::outside); };

        // Second-order one-sided differences, taken from the continuation side.
        rep.reflection.push_back({t, (-3.0 * v(0.0) + 4.0 * v(d) - v(2.0 * d)) / (2.0 * d)});
        if (const auto band = table.band_at(t)) {
            const double b1 = band->lo;
            if (b1 >= 2.0 * d) {
                const double vx = (3.0 * v(b1) - 4.0 * v(b1 - d) + v(b1 - 2.0 * d)) / (2.0 * d);
                const double gx = gain_x(spec, t, b1);
                rep.smooth_fit.push_back({t, 1, b1, vx, gx, std::abs(vx - gx), near_T});
            }
            if (std::isfinite(band->hi)) {
                const double b2 = band->hi;
                const double vx = (-3.0 * v(b2) + 4.0 * v(b2 + d) - v(b2 + 2.0 * d)) / (2.0 * d);
                const double gx = gain_x(spec, t, b2);
                rep.smooth_fit.push_back({t, 2, b2, vx, gx, std::abs(vx - gx), near_T});
            }
        }

        double prev = -1e300;
        for (double x : probe_levels) {
            const ValueResult r = value_at(spec, table, t, x);
            rep.max_v_minus_g = std::max(rep.max_v_minus_g, r.v - r.g);
            rep.max_raw_v_minus_g = std::max(rep.max_raw_v_minus_g, r.v_raw - r.g);
            if (prev > -1e300) rep.max_decrease_in_x = std::max(rep.max_decrease_in_x, prev - r.v);
            prev = r.v;
        }
    }
    return rep;
}

std::string value_surface_csv(const ProblemSpec& spec, const BoundaryTable& table, std::span<const double> times,
                              std::span<const double> levels) {
    std::string out = "t,x,V,G,region\n";
    char buf[160];
    for (double t : times) {
        for (double x : levels) {
            const ValueResult r = value_at(spec, table, t, x);
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%s\n", t, x, r.v, r.g,
                          r.region == Region::stopping ? "stopping" : "continuation");
            out += buf;
        }
    }
    return out;
}

std::string diagnostics_csv(const DiagnosticReport& report) {
    std::string out = "kind,t,boundary,level,v_x,g_x,discrepancy,near_horizon\n";
    char buf[200];
    for (const auto& p : report.smooth_fit) {
        std::snprintf(buf, sizeof buf, "smooth_fit,%.12g,%d,%.12g,%.12g,%.12g,%.6g,%d\n", p.t, p.boundary, p.level,
                      p.v_x, p.g_x, p.discrepancy, p.near_horizon ? 1 : 0);
        out += buf;
    }
    for (const auto& p : report.reflection) {
        std::snprintf(buf, sizeof buf, "reflection,%.12g,,0,%.12g,0,%.6g,0\n", p.t, p.v_x, std::abs(p.v_x));
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "ordering,,,,,,%.6g,0\nordering_raw,,,,,,%.6g,0\nmonotonicity,,,,,,%.6g,0\n",
                  report.max_v_minus_g, report.max_raw_v_minus_g, report.max_decrease_in_x);
    out += buf;
    return out;
}

}  // namespace stopmax
