#include "stopmax/boundary_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "stopmax/gain_model.hpp"
#include "stopmax/roots.hpp"

namespace stopmax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMonotoneTol = 1e-6;

struct StepOutcome {
    bool band = false;
    double b1 = kNaN;
    double b2 = kNaN;
};

// Largest value of F on [lo, hi]: a coarse scan, then golden section around the best point.
std::pair<double, double> probe_interior(const StepEquation& f, double lo, double hi, double first_guess) {
    double best_x = first_guess;
    double best_f = f(first_guess);
    if (best_f > 0.0) return {best_x, best_f};
    constexpr int kScan = 8;
    int best_i = -1;
    for (int i = 1; i <= kScan; ++i) {
        const double x = lo + (hi - lo) * i / (kScan + 1);
        const double v = f(x);
        if (v > best_f) {
            best_f = v;
            best_x = x;
            best_i = i;
        }
        if (v > 0.0) return {x, v};
    }
    double a = lo, b = hi;
    if (best_i > 0) {
        a = lo + (hi - lo) * (best_i - 1) / (kScan + 1);
        b = lo + (hi - lo) * (best_i + 1) / (kScan + 1);
    }
    auto [x, v] = roots::golden_section_max(f, a, b, std::max(1e-9, 1e-6 * (hi - lo)));
    if (v > best_f) return {x, v};
    return {best_x, best_f};
}

double find_root(const StepEquation& f, double a, double b, double fa, double fb, const SolverConfig& cfg) {
    auto r = roots::brent(f, a, b, fa, fb, cfg.level_tol, cfg.root_tol);
    if (!r.converged) throw ToleranceError("solve_boundaries: root finder did not reach root_tol");
    return r.x;
}

StepOutcome solve_step_positive_drift(const BoundaryTable& table, int k, const SolverConfig& cfg) {
    const double tk = table.times[k];
    const GammaPoint g = gamma_at(table.spec, tk);
    if (!g.exists) return {};
    // The band at t_k lies inside the band at t_{k+1} and inside {H >= 0}.
    const double lo_lim = std::max(g.gamma1, table.b1[k + 1]);
    const double hi_lim = std::min(g.gamma2, table.b2[k + 1]);
    if (!(hi_lim > lo_lim)) return {};

    KernelOptions opt = cfg.kernel_options();
    StepEquation f(table, k, opt);
    auto [m, fm] = probe_interior(f, lo_lim, hi_lim, 0.5 * (lo_lim + hi_lim));
    if (!(fm > 0.0)) {
        KernelOptions fine = opt;
        fine.panel_sd /= 4.0;
        const StepEquation f_fine(table, k, fine);
        auto [m4, fm4] = probe_interior(f_fine, lo_lim, hi_lim, m);
        if (!(fm4 > 0.0)) return {};
        m = m4;
        fm = f(m);
        if (!(fm > 0.0)) return {};
    }

    double lo = g.gamma1;
    double f_lo = f(lo);
    if (f_lo >= 0.0) {
        lo = 0.0;
        f_lo = f(lo);
        if (f_lo >= 0.0) throw BracketError("solve_boundaries: no sign change below the band at t = " + std::to_string(tk));
    }
    double hi = g.gamma2;
    double f_hi = f(hi);
    for (int i = 0; f_hi >= 0.0; ++i) {
        if (i == 30) throw BracketError("solve_boundaries: no sign change above the band at t = " + std::to_string(tk));
        hi += (hi - m) + 1e-3;
        f_hi = f(hi);
    }
    StepOutcome out;
    out.b1 = find_root(f, lo, m, f_lo, fm, cfg);
    out.b2 = find_root(f, m, hi, fm, f_hi, cfg);
    out.band = out.b2 - out.b1 >= cfg.merge_gap;
    return out;
}

StepOutcome solve_step_single(const BoundaryTable& table, int k, const SolverConfig& cfg) {
    const double tk = table.times[k];
    const GammaPoint g = gamma_at(table.spec, tk);
    StepEquation f(table, k, cfg.kernel_options());
    double lo = g.gamma1;
    double f_lo = f(lo);
    if (f_lo >= 0.0) {
        lo = 0.0;
        f_lo = f(lo);
        if (f_lo >= 0.0) throw BracketError("solve_boundaries: equation positive at x = 0, t = " + std::to_string(tk));
    }
    const double scale = std::sqrt(table.spec.horizon - tk);
    double step = 0.25 * scale;
    double hi = std::max(lo, table.b1[k + 1]) + step;
    double f_hi = f(hi);
    for (int i = 0; f_hi <= 0.0; ++i) {
        if (i == 40) throw BracketError("solve_boundaries: equation never turns positive at t = " + std::to_string(tk));
        lo = hi;
        f_lo = f_hi;
        step *= 2.0;
        hi += step;
        f_hi = f(hi);
    }
    StepOutcome out;
    out.band = true;
    out.b1 = find_root(f, lo, hi, f_lo, f_hi, cfg);
    out.b2 = kInf;
    return out;
}

void record_shape(BoundaryTable& table) {
    const int n = static_cast<int>(table.size()) - 1;
    const int first = table.first_band_index;
    if (table.spec.mu > 0.0) {
        for (int k = first; k < n; ++k) {
            const double d1 = table.b1[k + 1] - table.b1[k];
            const double d2 = table.b2[k] - table.b2[k + 1];
            if (d1 > kMonotoneTol) table.violations.push_back({k, 1, d1});
            if (d2 > kMonotoneTol) table.violations.push_back({k, 2, d2});
        }
        return;
    }
    int arg = first;
    for (int k = first; k <= n; ++k)
        if (table.b1[k] > table.b1[arg]) arg = k;
    table.z_star = table.times[arg];
    for (int k = first; k < n; ++k) {
        const double d = table.b1[k + 1] - table.b1[k];
        const double v = k < arg ? -d : d;
        if (v > kMonotoneTol) table.violations.push_back({k, 1, v});
    }
}

std::vector<double> uniform_grid(const ProblemSpec& spec, int n) {
    std::vector<double> t(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k < n; ++k) t[k] = spec.horizon * k / n;
    t[n] = spec.horizon;
    return t;
}

}  // namespace

void SolverConfig::validate() const {
    if (n_steps < 16) throw DomainError("n_steps must be >= 16");
    if (quad_order < 2 || quad_order > 512) throw DomainError("quad_order must lie in [2, 512]");
    if (!(root_tol > 0.0) || !(level_tol > 0.0) || !(merge_gap > 0.0))
        throw DomainError("solver tolerances must be positive");
}

KernelOptions SolverConfig::kernel_options() const {
    KernelOptions o;
    o.quad_order = quad_order;
    return o;
}

std::optional<BoundaryTable::Band> BoundaryTable::band_at(double t) const {
    const double T = spec.horizon;
    if (t < -1e-12 * T || t > T * (1.0 + 1e-12)) throw DomainError("band_at: time outside [0, T]");
    const int n = static_cast<int>(size()) - 1;
    const double pos = std::clamp(t / T * n, 0.0, static_cast<double>(n));
    const double eps = 1e-9;
    int k = static_cast<int>(std::floor(pos + eps));
    k = std::min(k, n);
    if (k < first_band_index) return std::nullopt;
    const double w = pos - k;
    if (k == n || w <= eps) return Band{b1[k], b2[k]};
    const double lo = (1.0 - w) * b1[k] + w * b1[k + 1];
    const double hi = std::isinf(b2[k]) ? kInf : (1.0 - w) * b2[k] + w * b2[k + 1];
    return Band{lo, hi};
}

double residual_I(const ProblemSpec& spec, double t, double x, const KernelOptions& opt) {
    return kernel_J(spec, t, x, opt) - gain(spec, t, x);
}

StepEquation::StepEquation(const BoundaryTable& table, int k, KernelOptions opt)
    : table_(table), k_(k), opt_(opt) {}

double StepEquation::operator()(double xi) const {
    const ProblemSpec& spec = table_.spec;
    const int n = static_cast<int>(table_.size()) - 1;
    const double tk = table_.times[k_];
    const double h = table_.step();
    double sum = 0.25 * h_function(spec, tk, xi);
    for (int j = k_ + 1; j <= n; ++j) {
        const double w = j == n ? 0.5 : 1.0;
        sum += w * kernel_band(spec, tk, xi, table_.times[j] - tk, table_.b1[j], table_.b2[j], opt_);
    }
    return kernel_J(spec, tk, xi, opt_) - gain(spec, tk, xi) - h * sum;
}

BoundaryTable solve_boundaries(const ProblemSpec& spec, const SolverConfig& config) {
    spec.validate();
    config.validate();
    const int n = config.n_steps;
    BoundaryTable table;
    table.spec = spec;
    table.config = config;
    table.times = uniform_grid(spec, n);
    table.b1.assign(n + 1, kNaN);
    table.b2.assign(n + 1, kNaN);
    table.b1[n] = 0.0;
    table.b2[n] = spec.mu > 0.0 ? 0.5 / spec.mu : kInf;
    table.first_band_index = n;
    table.t_star = 0.0;

    for (int k = n - 1; k >= 0; --k) {
        const StepOutcome s = spec.mu > 0.0 ? solve_step_positive_drift(table, k, config)
                                            : solve_step_single(table, k, config);
        if (!s.band) {
            table.t_star = 0.5 * (table.times[k] + table.times[k + 1]);
            break;
        }
        table.b1[k] = s.b1;
        table.b2[k] = s.b2;
        table.first_band_index = k;
    }
    record_shape(table);
    return table;
}

DefectReport volterra_defect(const BoundaryTable& table) {
    DefectReport r;
    const std::size_t n = table.size() - 1;
    r.b1.assign(n + 1, kNaN);
    r.b2.assign(n + 1, kNaN);
    r.b1[n] = 0.0;
    if (std::isfinite(table.b2[n])) r.b2[n] = 0.0;
    const KernelOptions opt = table.config.kernel_options();
    for (std::size_t k = static_cast<std::size_t>(table.first_band_index); k < n; ++k) {
        const StepEquation f(table, static_cast<int>(k), opt);
        r.b1[k] = std::abs(f(table.b1[k]));
        r.max_defect = std::max(r.max_defect, r.b1[k]);
        if (std::isfinite(table.b2[k])) {
            r.b2[k] = std::abs(f(table.b2[k]));
            r.max_defect = std::max(r.max_defect, r.b2[k]);
        }
    }
    return r;
}

ConvergenceReport refine_convergence(const ProblemSpec& spec, const SolverConfig& config,
                                     const std::vector<int>& factors) {
    if (factors.empty()) throw DomainError("refine_convergence: factors must be nonempty");
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (factors[i] < 1) throw DomainError("refine_convergence: factors must be >= 1");
        if (i > 0 && (factors[i] <= factors[i - 1] || factors[i] % factors[i - 1] != 0))
            throw DomainError("refine_convergence: each factor must be a multiple of the previous one");
    }
    std::vector<BoundaryTable> tables;
    for (int f : factors) {
        SolverConfig c = config;
        c.n_steps = config.n_steps * f;
        tables.push_back(solve_boundaries(spec, c));
    }
    ConvergenceReport rep;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        ConvergenceLevel lvl{tables[i].config.n_steps, tables[i].t_star, kNaN};
        if (i + 1 < tables.size()) {
            const auto& a = tables[i];
            const auto& b = tables[i + 1];
            const int ratio = b.config.n_steps / a.config.n_steps;
            double diff = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) {
                const std::size_t kb = k * static_cast<std::size_t>(ratio);
                if (!a.has_band(k) || !b.has_band(kb)) continue;
                diff = std::max(diff, std::abs(a.b1[k] - b.b1[kb]));
                if (std::isfinite(a.b2[k])) diff = std::max(diff, std::abs(a.b2[k] - b.b2[kb]));
            }
            lvl.max_diff_to_next = diff;
        }
        rep.levels.push_back(lvl);
    }
    rep.differences_decrease = true;
    for (std::size_t i = 1; i + 1 < rep.levels.size(); ++i)
        if (!(rep.levels[i].max_diff_to_next < rep.levels[i - 1].max_diff_to_next)) rep.differences_decrease = false;
    return rep;
}

std::string boundary_csv(const BoundaryTable& table) {
    std::string out = "t,b1,b2\n";
    char buf[96];
    for (std::size_t k = 0; k < table.size(); ++k) {
        if (!table.has_band(k)) {
            std::snprintf(buf, sizeof buf, "%.12g,,\n", table.times[k]);
        } else if (std::isinf(table.b2[k])) {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,inf\n", table.times[k], table.b1[k]);
        } else {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", table.times[k], table.b1[k], table.b2[k]);
        }
        out += buf;
    }
    return out;
}

BoundaryTable parse_boundary_csv(const std::string& body, const ProblemSpec& spec, const SolverConfig& config) {
    std::istringstream in(body);
    std::string line;
    bool header = false;
    BoundaryTable t;
    t.spec = spec;
    t.config = config;
    t.first_band_index = -1;
    auto field = [](const std::string& s) {
        if (s.empty()) return kNaN;
        if (s == "inf") return kInf;
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw ConfigError("boundary csv: bad number '" + s + "'");
        return v;
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "t,b1,b2") throw ConfigError("boundary csv: expected header t,b1,b2");
            header = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) throw ConfigError("boundary csv: expected 3 fields");
        try {
            t.times.push_back(field(line.substr(0, c1)));
            t.b1.push_back(field(line.substr(c1 + 1, c2 - c1 - 1)));
            t.b2.push_back(field(line.substr(c2 + 1)));
        } catch (const std::logic_error&) {
            throw ConfigError("boundary csv: bad row '" + line + "'");
        }
        const std::size_t k = t.times.size() - 1;
        if (std::isnan(t.b1[k]) != std::isnan(t.b2[k])) throw ConfigError("boundary csv: half-empty row");
        if (t.first_band_index < 0 && !std::isnan(t.b1[k])) t.first_band_index = static_cast<int>(k);
    }
    if (!header) throw ConfigError("boundary csv: missing header");
    const int n = config.n_steps;
    if (static_cast<int>(t.times.size()) != n + 1)
        throw SpecMismatchError("boundary csv: row count does not match the configured step count");
    for (int k = 0; k <= n; ++k) {
        if (std::abs(t.times[k] - spec.horizon * k / n) > 1e-9 * spec.horizon)
            throw SpecMismatchError("boundary csv: time grid does not match the horizon");
    }
    if (t.first_band_index < 0) throw SpecMismatchError("boundary csv: table has no band at T");
    for (int k = t.first_band_index; k <= n; ++k) {
        if (std::isnan(t.b1[k])) throw ConfigError("boundary csv: gap inside the banded range");
        if (std::isinf(t.b2[k]) != (spec.mu <= 0.0))
            throw SpecMismatchError("boundary csv: b2 column inconsistent with the drift sign");
    }
    if (spec.mu > 0.0 && std::abs(t.b2[n] - 0.5 / spec.mu) > 1e-9)
        throw SpecMismatchError("boundary csv: terminal b2 does not match the drift");
    t.times[n] = spec.horizon;
    t.t_star = t.first_band_index == 0 ? 0.0 : 0.5 * (t.times[t.first_band_index - 1] + t.times[t.first_band_index]);
    record_shape(t);
    return t;
}

}  // namespace stopmax
