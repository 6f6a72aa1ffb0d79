// Acceptance run: one [PASS]/[FAIL] line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "stopmax/boundary_solver.hpp"
#include "stopmax/dp_oracle.hpp"
#include "stopmax/expectation_kernels.hpp"
#include "stopmax/gain_model.hpp"
#include "stopmax/mc_lab.hpp"
#include "stopmax/value_engine.hpp"

using namespace stopmax;

namespace {

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::shared_ptr<const BoundaryTable> table(double mu, double horizon = 1.0, int n = 200) {
    static std::map<std::tuple<double, double, int>, std::shared_ptr<const BoundaryTable>> cache;
    auto& slot = cache[{mu, horizon, n}];
    if (!slot) {
        SolverConfig c;
        c.n_steps = n;
        slot = std::make_shared<const BoundaryTable>(solve_boundaries({mu, horizon}, c));
    }
    return slot;
}

struct Verdict {
    bool pass;
    std::string detail;
};

// ---------------------------------------------------------------------------

Verdict terminal_values() {
    bool ok = true;
    std::string worst;
    for (double horizon : {1.0, 2.0})
        for (double mu : {-0.5, 0.0, 0.25, 1.0, 2.0, 4.0}) {
            const auto t = table(mu, horizon, 64);
            const bool b1 = t->b1.back() == 0.0;
            const bool b2 = mu > 0.0 ? t->b2.back() == 1.0 / (2.0 * mu) : std::isinf(t->b2.back());
            if (!(b1 && b2)) {
                ok = false;
                worst += fmt(" mu=%g T=%g", mu, horizon);
            }
        }
    return {ok, ok ? "b1(T)=0 and b2(T)=1/(2mu) exactly for 12 problems" : "mismatch at" + worst};
}

Verdict sandwich_and_monotonicity() {
    double sand = 0.0, mono = 0.0;
    std::string info;
    for (double mu : {0.25, 1.0, 4.0}) {
        const auto t = table(mu);
        for (std::size_t k = t->first_band_index; k < t->size(); ++k) {
            const auto g = gamma_at(t->spec, t->times[k]);
            if (!g.exists) {
                sand = INFINITY;
                continue;
            }
            sand = std::max({sand, g.gamma1 - t->b1[k], t->b2[k] - g.gamma2});
            if (k + 1 < t->size()) mono = std::max({mono, t->b1[k + 1] - t->b1[k], t->b2[k] - t->b2[k + 1]});
        }
        info += fmt(" mu=%g:%zu pts", mu, t->size() - t->first_band_index);
    }
    return {sand <= 1e-4 && mono <= 1e-6, fmt("max sandwich breach %.2e, max monotone breach %.2e;", sand, mono) + info};
}

Verdict zero_drift_similarity() {
    const auto t = table(0.0);
    double lo = INFINITY, hi = 0.0, sum = 0.0;
    int cnt = 0;
    for (std::size_t k = 0; k < t->size() && t->times[k] <= 0.95 + 1e-12; ++k) {
        const double c = t->b1[k] / std::sqrt(1.0 - t->times[k]);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        sum += c;
        ++cnt;
    }
    const double c = sum / cnt;
    const double spread = (hi - lo) / c;
    const DpResult dp = solve_dp(t->spec);
    double worst = 0.0;
    for (std::size_t j = 0; j < dp.times.size(); ++j) {
        if (dp.times[j] > 0.95 + 1e-12) break;
        worst = std::max(worst, std::abs(dp.lower_edge[j] - c * std::sqrt(1.0 - dp.times[j])) / dp.cell);
    }
    return {spread < 0.02 && worst <= 2.0,
            fmt("b1/sqrt(T-t) = %.5f, relative spread %.2e; DP edge within %.2f cells (cell %.4f)", c, spread, worst, dp.cell)};
}

Verdict volterra_defects() {
    double worst = 0.0, tol = 0.0;
    for (double mu : {-0.5, 0.0, 0.25, 1.0, 4.0}) {
        const auto t = table(mu);
        worst = std::max(worst, volterra_defect(*t).max_defect);
        tol = 10.0 * t->config.root_tol;
    }
    return {worst <= tol, fmt("max defect %.2e over 5 drifts (limit %.0e)", worst, tol)};
}

Verdict kernels_vs_mc() {
    const std::size_t n = 1000000;
    double worst_z = 0.0;
    int checks = 0;
    std::string where;
    std::uint64_t seed = 1;
    const double y_k = 0.25, z_k = 0.75, y_l = 0.5;
    for (double mu : {-0.5, 0.0, 1.0}) {
        const ProblemSpec s{mu, 1.0};
        for (double t : {0.0, 0.4, 0.8})
            for (double x : {0.0, 0.3, 0.8})
                for (double frac : {0.1, 0.5, 1.0}) {
                    const double u = frac * (1.0 - t);
                    const auto xs = sample_X(s, x, u, n, seed++);
                    std::vector<double> kv(n), lv(n), jv(n);
                    for (std::size_t i = 0; i < n; ++i) {
                        const double w = xs[i];
                        const double h = h_function(s, t + u, w);
                        kv[i] = (w > y_k && w < z_k) ? h : 0.0;
                        lv[i] = w > y_l ? h : 0.0;
                        jv[i] = w * w;
                    }
                    auto compare = [&](const char* what, double exact, const std::vector<double>& v) {
                        const Estimate e = estimate_mean(v);
                        const double z = std::abs(exact - e.mean) / e.se;
                        ++checks;
                        if (z > worst_z) {
                            worst_z = z;
                            where = fmt("%s at mu=%g t=%g x=%g u=%g", what, mu, t, x, u);
                        }
                    };
                    compare("K", kernel_K(s, t, x, u, y_k, z_k), kv);
                    compare("L", kernel_L(s, t, x, u, y_l), lv);
                    if (frac == 1.0) compare("J", kernel_J(s, t, x), jv);
                }
    }
    return {worst_z <= 3.0, fmt("%d comparisons at 1e6 samples, worst %.2f SE (", checks, worst_z) + where + ")"};
}

Verdict lemma_regression() {
    const auto batch = simulate({0.0, 1.0}, 1e-3, 1000000, 1);
    const auto rep = verify_lemma21(batch, 0.5, 20, 1000, workers());
    return {!rep.bins.empty() && rep.max_abs_z <= 4.0,
            fmt("%zu bins checked, %zu sparse, max |z| %.2f", rep.bins.size(), rep.sparse_bins.size(), rep.max_abs_z)};
}

Verdict optimality() {
    bool ok = true;
    std::string info;
    for (double mu : {0.0, 1.0}) {
        const auto t = table(mu);
        const auto batch = simulate(t->spec, 1e-3, 1000000, 1);
        const auto rivals = default_rivals(t);
        const auto rows = regret_scan(t, rivals, batch, workers());
        const Estimate band = rows[0].estimate.value;
        const double v = value_at(t->spec, *t, 0.0, 0.0).v;
        const double z = std::abs(band.mean - v) / band.se;
        double best = INFINITY;
        std::string best_name;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double zi = rows[i].estimate.diff_mean / rows[i].estimate.diff_stderr;
            if (zi < best) {
                best = zi;
                best_name = rows[i].estimate.name;
            }
        }
        const bool beaten = std::any_of(rows.begin(), rows.end(), [](const RegretRow& r) { return r.beats_band; });
        ok = ok && z <= 3.0 && !beaten;
        info += fmt("mu=%g: band %.5f+-%.5f vs V(0,0) %.5f (%.2f SE), closest rival %s at %+.2f SE; ", mu, band.mean, band.se,
                    v, z, best_name.c_str(), best);
    }
    return {ok, info};
}

Verdict black_hole_and_hump() {
    // regression pins from the first verified run (n = 200)
    constexpr double kPinnedTStar = 0.9675;
    constexpr double kPinnedZStar = 0.485;
    const auto pos = table(1.0);
    bool ok = pos->t_star > 0.0;
    for (std::size_t k = 0; k < pos->size(); ++k)
        if (pos->times[k] > pos->t_star) ok = ok && pos->has_band(k) && pos->b1[k] < pos->b2[k] && std::isfinite(pos->b2[k]);
    const auto neg = table(-0.5);
    const double h = neg->step();
    const bool has_hump = neg->z_star && *neg->z_star > 0.0 && *neg->z_star < 1.0;
    double breach = 0.0;
    if (has_hump)
        for (std::size_t k = 0; k + 1 < neg->size(); ++k) {
            if (neg->times[k + 1] <= *neg->z_star) breach = std::max(breach, neg->b1[k] - neg->b1[k + 1]);
            if (neg->times[k] >= *neg->z_star) breach = std::max(breach, neg->b1[k + 1] - neg->b1[k]);
        }
    ok = ok && has_hump && breach <= 1e-6;
    const bool pinned = std::abs(pos->t_star - kPinnedTStar) <= pos->step() + 1e-12 &&
                        has_hump && std::abs(*neg->z_star - kPinnedZStar) <= 2.0 * h + 1e-12;
    ok = ok && pinned;
    return {ok, fmt("mu=1: t_star %.4f (pinned %.4f); mu=-0.5: z_star %.4f (pinned %.4f), b1 peak %.4f, shape breach %.1e",
                    pos->t_star, kPinnedTStar, has_hump ? *neg->z_star : NAN, kPinnedZStar,
                    *std::max_element(neg->b1.begin(), neg->b1.end()), breach)};
}

Verdict dp_equivalence() {
    bool ok = true;
    std::string info;
    for (double mu : {0.0, 1.0}) {
        const auto t = table(mu);
        const DpResult dp = solve_dp(t->spec);
        const int stride = static_cast<int>(dp.times.size() - 1) / static_cast<int>(t->size() - 1);
        double worst = 0.0;
        int compared = 0;
        // at T itself every level stops, so the terminal row has no edge to compare
        for (std::size_t k = t->first_band_index; k + 1 < t->size(); ++k) {
            const std::size_t j = k * stride;
            if (std::isnan(dp.lower_edge[j])) continue;
            worst = std::max(worst, std::abs(dp.lower_edge[j] - t->b1[k]) / dp.cell);
            if (std::isfinite(t->b2[k])) worst = std::max(worst, std::abs(dp.upper_edge[j] - t->b2[k]) / dp.cell);
            ++compared;
        }
        const double dv = std::abs(dp.value_at_zero(0.0) - value_at(t->spec, *t, 0.0, 0.0).v);
        ok = ok && compared > 0 && worst <= 2.0 && dv <= 5e-3;
        info += fmt("mu=%g: %d times, edges within %.2f cells, |dV(0,0)| %.1e; ", mu, compared, worst, dv);
    }
    return {ok, info};
}

Verdict free_boundary() {
    // With T = 1 the band opens only after t = 0.96, so smooth fit at 0.5 T and
    // 0.8 T is checked on T = 0.04 (mu sqrt(T) = 0.2), where it is open.
    const auto t = table(1.0, 0.04);
    const std::vector<double> times = {0.5 * 0.04, 0.8 * 0.04};
    const std::vector<double> levels = {0.0, 0.1, 0.2};
    const auto rep = diagnostics(t->spec, *t, times, levels);
    double fit = 0.0, refl = 0.0;
    bool ok = rep.smooth_fit.size() == 4;
    for (const auto& p : rep.smooth_fit) fit = std::max(fit, p.discrepancy);
    for (const auto& p : rep.reflection) refl = std::max(refl, std::abs(p.v_x));
    const auto t1 = table(1.0);
    const std::vector<double> times1 = {0.5, 0.8};
    const auto rep1 = diagnostics(t1->spec, *t1, times1, levels);
    for (const auto& p : rep1.reflection) refl = std::max(refl, std::abs(p.v_x));
    ok = ok && fit <= 1e-2 && refl <= 5e-3;
    return {ok, fmt("T=0.04: %zu smooth-fit probes, max |V_x-G_x| %.2e; max |V_x(t,0+)| %.2e (T=0.04 and T=1)",
                    rep.smooth_fit.size(), fit, refl)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* name;
        std::function<Verdict()> run;
    };
    const Criterion all[] = {
        {"C1", "terminal values", terminal_values},
        {"C2", "sandwich and monotonicity", sandwich_and_monotonicity},
        {"C3", "zero-drift self-similarity", zero_drift_similarity},
        {"C4", "integral-equation defect", volterra_defects},
        {"C5", "kernels vs Monte Carlo", kernels_vs_mc},
        {"C6", "conditional-mean identity", lemma_regression},
        {"C7", "optimality of the band rule", optimality},
        {"C8", "late band and hump", black_hole_and_hump},
        {"C9", "dynamic-programming oracle", dp_equivalence},
        {"C10", "smooth fit and normal reflection", free_boundary},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v{false, ""};
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !v.pass;
        std::printf("[%s] %-4s %-34s %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(all)) - failed, std::size(all));
    return failed == 0 ? 0 : 1;
}
