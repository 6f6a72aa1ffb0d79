#include "stopmax/mc_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "stopmax/gain_model.hpp"

namespace stopmax {

namespace {

constexpr std::size_t kChunk = 4096;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Neumaier summation; chunk partials are combined in chunk order.
struct Compensated {
    double sum = 0.0, c = 0.0;
    void add(double v) {
        const double t = sum + v;
        c += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

Estimate finish(double s, double s2, std::size_t n) {
    Estimate e;
    e.n = n;
    if (n == 0) return e;
    e.mean = s / static_cast<double>(n);
    if (n > 1) {
        const double var = std::max(0.0, (s2 - s * e.mean) / static_cast<double>(n - 1));
        e.se = std::sqrt(var / static_cast<double>(n));
    }
    return e;
}

// Runs body(chunk_index, first_path, last_path) over all chunks; chunk c goes to worker c % workers.
template <class Body>
void for_each_chunk(std::size_t n_paths, int workers, Body&& body) {
    const std::size_t n_chunks = (n_paths + kChunk - 1) / kChunk;
    auto run = [&](int w, int stride) {
        for (std::size_t c = static_cast<std::size_t>(w); c < n_chunks; c += static_cast<std::size_t>(stride))
            body(c, c * kChunk, std::min(n_paths, (c + 1) * kChunk));
    };
    workers = std::max(1, std::min<int>(workers, static_cast<int>(n_chunks)));
    if (workers == 1) {
        run(0, 1);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    for (auto& th : pool) th.join();
}

std::size_t chunk_count(std::size_t n_paths) { return (n_paths + kChunk - 1) / kChunk; }

struct CompiledRule {
    std::vector<double> lo, hi;
};

CompiledRule compile(const StoppingRule& rule, const PathBatch& batch) {
    const int n = batch.n_steps;
    const double T = batch.spec.horizon;
    CompiledRule c;
    c.lo.assign(n + 1, kInf);
    c.hi.assign(n + 1, kInf);
    for (int k = 0; k <= n; ++k) {
        const double t = k == n ? T : k * batch.dt;
        switch (rule.kind) {
            case StoppingRule::Kind::band:
                if (auto b = rule.table->band_at(t)) {
                    c.lo[k] = b->lo + rule.shift;
                    c.hi[k] = b->hi + rule.shift;
                }
                break;
            case StoppingRule::Kind::constant_time:
                if (t >= rule.param - 1e-12 * T) c.lo[k] = -kInf;
                break;
            case StoppingRule::Kind::threshold:
                c.lo[k] = rule.param;
                break;
            case StoppingRule::Kind::scaled_threshold:
                c.lo[k] = rule.param * std::sqrt(std::max(0.0, T - t));
                break;
            case StoppingRule::Kind::never:
                break;
        }
    }
    c.lo[n] = -kInf;
    c.hi[n] = kInf;
    return c;
}

}  // namespace

Estimate estimate_mean(std::span<const double> values) {
    double s = 0.0, s2 = 0.0;
    for (double v : values) {
        s += v;
        s2 += v * v;
    }
    return finish(s, s2, values.size());
}

PathBatch simulate(const ProblemSpec& spec, double dt, std::size_t n_paths, std::uint64_t seed, bool bridge_max) {
    spec.validate();
    if (!(dt > 0.0) || dt > spec.horizon / 100.0 * (1.0 + 1e-12)) throw DomainError("simulate: dt must lie in (0, T/100]");
    if (n_paths == 0) throw DomainError("simulate: n_paths must be >= 1");
    const double steps = spec.horizon / dt;
    const int n = static_cast<int>(std::llround(steps));
    if (std::abs(steps - n) > 1e-6 * steps) throw DomainError("simulate: dt must divide the horizon");
    PathBatch b;
    b.spec = spec;
    b.n_steps = n;
    b.dt = spec.horizon / n;
    b.n_paths = n_paths;
    b.seed = seed;
    b.bridge_max = bridge_max;
    return b;
}

PathCursor::PathCursor(const PathBatch& batch, std::uint64_t index)
    : gen_(batch.seed),
      index_(index),
      mu_dt_(batch.spec.mu * batch.dt),
      sd_(std::sqrt(batch.dt)),
      dt_(batch.dt),
      bridge_(batch.bridge_max) {}

void PathCursor::advance() {
    const int lane = step_ & 1;
    if (lane == 0) {
        block_ = gen_.at(1, index_, static_cast<std::uint32_t>(step_ >> 1));
        z_ = rng::box_muller(block_[0], block_[1]);
    }
    const double next = b_ + mu_dt_ + sd_ * z_[lane];
    if (bridge_) {
        const double d = next - b_;
        const double top = 0.5 * (b_ + next + std::sqrt(d * d - 2.0 * dt_ * std::log(rng::to_unit(block_[2 + lane]))));
        s_ = std::max(s_, top);
    } else {
        s_ = std::max(s_, next);
    }
    b_ = next;
    ++step_;
}

StoppingRule StoppingRule::band(std::shared_ptr<const BoundaryTable> table, double shift) {
    if (!table) throw DomainError("band rule needs a boundary table");
    StoppingRule r;
    r.kind = Kind::band;
    r.table = std::move(table);
    r.shift = shift;
    char buf[64];
    std::snprintf(buf, sizeof buf, shift == 0.0 ? "band" : "band%+.3g", shift);
    r.name = buf;
    return r;
}

StoppingRule StoppingRule::constant_time(double t0) {
    StoppingRule r;
    r.kind = Kind::constant_time;
    r.param = t0;
    char buf[64];
    std::snprintf(buf, sizeof buf, t0 == 0.0 ? "immediate" : "constant(%.4g)", t0);
    r.name = buf;
    return r;
}

StoppingRule StoppingRule::threshold(double a) {
    StoppingRule r;
    r.kind = Kind::threshold;
    r.param = a;
    char buf[64];
    std::snprintf(buf, sizeof buf, "threshold(%.4g)", a);
    r.name = buf;
    return r;
}

StoppingRule StoppingRule::scaled_threshold(double c) {
    StoppingRule r;
    r.kind = Kind::scaled_threshold;
    r.param = c;
    char buf[64];
    std::snprintf(buf, sizeof buf, "scaled(%.4g)", c);
    r.name = buf;
    return r;
}

StoppingRule StoppingRule::never() {
    StoppingRule r;
    r.name = "never";
    return r;
}

std::vector<RuleEstimate> evaluate_rules(const PathBatch& batch, std::span<const StoppingRule> rules, int workers) {
    const std::size_t nr = rules.size();
    if (nr == 0) return {};
    std::vector<CompiledRule> compiled;
    for (const auto& r : rules) {
        if (r.kind == StoppingRule::Kind::band && !(r.table->spec == batch.spec))
            throw SpecMismatchError("band rule table was solved for a different problem");
        compiled.push_back(compile(r, batch));
    }
    const int n = batch.n_steps;
    // Per chunk and rule: sum v, sum v^2, sum d, sum d^2 (d = v - v_first).
    std::vector<double> acc(chunk_count(batch.n_paths) * nr * 4, 0.0);
    for_each_chunk(batch.n_paths, workers, [&](std::size_t c, std::size_t first, std::size_t last) {
        double* a = acc.data() + c * nr * 4;
        std::vector<double> b_tau(nr);
        std::vector<char> done(nr);
        for (std::size_t p = first; p < last; ++p) {
            PathCursor cur(batch, p);
            std::fill(done.begin(), done.end(), 0);
            std::size_t open = nr;
            for (int k = 0;; ++k) {
                if (open > 0) {
                    const double x = cur.gap();
                    for (std::size_t r = 0; r < nr; ++r) {
                        if (done[r]) continue;
                        if (x >= compiled[r].lo[k] && x <= compiled[r].hi[k]) {
                            done[r] = 1;
                            b_tau[r] = cur.b();
                            --open;
                        }
                    }
                }
                if (k == n) break;
                cur.advance();
            }
            const double s_T = cur.s();
            const double v0 = (b_tau[0] - s_T) * (b_tau[0] - s_T);
            for (std::size_t r = 0; r < nr; ++r) {
                const double v = (b_tau[r] - s_T) * (b_tau[r] - s_T);
                const double d = v - v0;
                a[4 * r] += v;
                a[4 * r + 1] += v * v;
                a[4 * r + 2] += d;
                a[4 * r + 3] += d * d;
            }
        }
    });
    std::vector<RuleEstimate> out(nr);
    for (std::size_t r = 0; r < nr; ++r) {
        Compensated s, s2, d, d2;
        for (std::size_t c = 0; c < chunk_count(batch.n_paths); ++c) {
            const double* a = acc.data() + (c * nr + r) * 4;
            s.add(a[0]);
            s2.add(a[1]);
            d.add(a[2]);
            d2.add(a[3]);
        }
        out[r].name = rules[r].name;
        out[r].value = finish(s.value(), s2.value(), batch.n_paths);
        const Estimate de = finish(d.value(), d2.value(), batch.n_paths);
        out[r].diff_mean = de.mean;
        out[r].diff_stderr = de.se;
    }
    return out;
}

Estimate evaluate_rule(const PathBatch& batch, const StoppingRule& rule, int workers) {
    return evaluate_rules(batch, std::span<const StoppingRule>(&rule, 1), workers).front().value;
}

int stopping_step(const PathBatch& batch, const StoppingRule& rule, std::uint64_t index) {
    if (rule.kind == StoppingRule::Kind::band && !(rule.table->spec == batch.spec))
        throw SpecMismatchError("band rule table was solved for a different problem");
    if (index >= batch.n_paths) throw DomainError("stopping_step: path index out of range");
    const CompiledRule c = compile(rule, batch);
    PathCursor cur(batch, index);
    for (int k = 0; k < batch.n_steps; ++k) {
        const double x = cur.gap();
        if (x >= c.lo[k] && x <= c.hi[k]) return k;
        cur.advance();
    }
    return batch.n_steps;
}

Estimate terminal_functional(const PathBatch& batch, const std::function<double(double, double)>& f, int workers) {
    std::vector<double> acc(chunk_count(batch.n_paths) * 2, 0.0);
    for_each_chunk(batch.n_paths, workers, [&](std::size_t c, std::size_t first, std::size_t last) {
        for (std::size_t p = first; p < last; ++p) {
            PathCursor cur(batch, p);
            for (int k = 0; k < batch.n_steps; ++k) cur.advance();
            const double v = f(cur.b(), cur.s());
            acc[2 * c] += v;
            acc[2 * c + 1] += v * v;
        }
    });
    Compensated s, s2;
    for (std::size_t c = 0; c < chunk_count(batch.n_paths); ++c) {
        s.add(acc[2 * c]);
        s2.add(acc[2 * c + 1]);
    }
    return finish(s.value(), s2.value(), batch.n_paths);
}

LemmaReport verify_lemma21(const PathBatch& batch, double t, int n_bins, std::size_t min_count, int workers) {
    const ProblemSpec& spec = batch.spec;
    if (!(t > 0.0 && t < spec.horizon)) throw DomainError("verify_lemma21: t must lie in (0, T)");
    const int kt = static_cast<int>(std::llround(t / batch.dt));
    if (std::abs(kt * batch.dt - t) > 1e-9 * spec.horizon) throw DomainError("verify_lemma21: t must be a grid time");
    if (n_bins < 1) throw DomainError("verify_lemma21: need at least one bin");

    const double x_hi = 4.0 * std::sqrt(t) + 2.0 * std::abs(spec.mu) * t;
    const double width = x_hi / n_bins;
    // G(t, .) tabulated finely; linear interpolation error is far below Monte Carlo noise.
    constexpr int kTab = 4000;
    std::vector<double> g_tab(kTab + 1);
    for (int i = 0; i <= kTab; ++i) g_tab[i] = gain(spec, t, x_hi * i / kTab);
    auto g_of = [&](double x) {
        if (x >= x_hi) return gain(spec, t, x);
        const double pos = x / x_hi * kTab;
        const int i = std::min(kTab - 1, static_cast<int>(pos));
        const double w = pos - i;
        return (1.0 - w) * g_tab[i] + w * g_tab[i + 1];
    };

    const std::size_t nb = static_cast<std::size_t>(n_bins);
    std::vector<double> acc(chunk_count(batch.n_paths) * nb * 4, 0.0);
    for_each_chunk(batch.n_paths, workers, [&](std::size_t c, std::size_t first, std::size_t last) {
        double* a = acc.data() + c * nb * 4;
        for (std::size_t p = first; p < last; ++p) {
            PathCursor cur(batch, p);
            for (int k = 0; k < kt; ++k) cur.advance();
            const double x = cur.gap();
            const double b_t = cur.b();
            for (int k = kt; k < batch.n_steps; ++k) cur.advance();
            if (x >= x_hi) continue;
            const auto bin = std::min(nb - 1, static_cast<std::size_t>(x / width));
            const double lhs = (cur.s() - b_t) * (cur.s() - b_t);
            a[4 * bin] += 1.0;
            a[4 * bin + 1] += lhs;
            a[4 * bin + 2] += lhs * lhs;
            a[4 * bin + 3] += g_of(x);
        }
    });

    LemmaReport rep;
    rep.t = t;
    for (std::size_t b = 0; b < nb; ++b) {
        Compensated cnt, s, s2, r;
        for (std::size_t c = 0; c < chunk_count(batch.n_paths); ++c) {
            const double* a = acc.data() + (c * nb + b) * 4;
            cnt.add(a[0]);
            s.add(a[1]);
            s2.add(a[2]);
            r.add(a[3]);
        }
        const auto count = static_cast<std::size_t>(std::llround(cnt.value()));
        LemmaBin bin{b * width, (b + 1) * width, count, 0.0, 0.0, 0.0, 0.0};
        if (count > 1) {
            const Estimate e = finish(s.value(), s2.value(), count);
            bin.lhs_mean = e.mean;
            bin.lhs_stderr = e.se;
            bin.rhs_mean = r.value() / static_cast<double>(count);
            bin.z = (bin.lhs_mean - bin.rhs_mean) / bin.lhs_stderr;
        }
        if (count >= min_count) {
            rep.max_abs_z = std::max(rep.max_abs_z, std::abs(bin.z));
            rep.bins.push_back(bin);
        } else {
            rep.sparse_bins.push_back(bin);
        }
    }
    return rep;
}

std::vector<StoppingRule> default_rivals(std::shared_ptr<const BoundaryTable> table) {
    const double T = table->spec.horizon;
    const double sT = std::sqrt(T);
    return {StoppingRule::never(),
            StoppingRule::constant_time(0.0),
            StoppingRule::constant_time(0.5 * T),
            StoppingRule::threshold(0.6 * sT),
            StoppingRule::threshold(0.8 * sT),
            StoppingRule::threshold(1.0 * sT),
            StoppingRule::threshold(1.4 * sT),
            StoppingRule::scaled_threshold(1.12),
            StoppingRule::band(table, 0.05 * sT)};
}

std::vector<RegretRow> regret_scan(std::shared_ptr<const BoundaryTable> table, std::span<const StoppingRule> rivals,
                                   const PathBatch& batch, int workers) {
    if (rivals.empty()) throw DomainError("regret_scan: rival list is empty");
    std::vector<StoppingRule> rules;
    rules.push_back(StoppingRule::band(table));
    rules.insert(rules.end(), rivals.begin(), rivals.end());
    const auto est = evaluate_rules(batch, rules, workers);
    std::vector<RegretRow> rows;
    for (std::size_t i = 0; i < est.size(); ++i)
        rows.push_back({est[i], i > 0 && est[i].diff_mean < -3.0 * est[i].diff_stderr});
    return rows;
}

std::string regret_csv(std::span<const RegretRow> rows, const PathBatch& batch) {
    std::string out = "rule,estimate,stderr,n_paths,dt,seed\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.12g,%.6g,%zu,%.12g,%llu\n", r.estimate.name.c_str(), r.estimate.value.mean,
                      r.estimate.value.se, batch.n_paths, batch.dt, static_cast<unsigned long long>(batch.seed));
        out += buf;
    }
    return out;
}

}  // namespace stopmax
