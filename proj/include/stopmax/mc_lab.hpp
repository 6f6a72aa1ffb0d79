#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stopmax/boundary_solver.hpp"
#include "stopmax/random.hpp"

namespace stopmax {

struct Estimate {
    double mean = 0.0;
    double se = 0.0;  ///< standard error of the mean
    std::size_t n = 0;
};

Estimate estimate_mean(std::span<const double> values);

/// A seeded ensemble of (B, S) paths on the grid t_k = k dt. Paths are generated on
/// demand: path i depends only on (seed, i), never on evaluation order.
struct PathBatch {
    ProblemSpec spec;
    double dt = 1e-3;
    int n_steps = 1000;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    bool bridge_max = true;  ///< S includes the exact maximum of each Brownian-bridge step
};

PathBatch simulate(const ProblemSpec& spec, double dt, std::size_t n_paths, std::uint64_t seed,
                   bool bridge_max = true);

/// Walks one path step by step.
class PathCursor {
public:
    PathCursor(const PathBatch& batch, std::uint64_t index);
    void advance();
    int step() const { return step_; }
    double t() const { return step_ * dt_; }
    double b() const { return b_; }
    double s() const { return s_; }
    double gap() const { return s_ - b_; }

private:
    rng::Philox4x32 gen_;
    std::uint64_t index_;
    double mu_dt_, sd_, dt_;
    bool bridge_;
    int step_ = 0;
    double b_ = 0.0, s_ = 0.0;
    rng::Philox4x32::Block block_{};
    std::array<double, 2> z_{};
};

struct StoppingRule {
    enum class Kind { band, constant_time, threshold, scaled_threshold, never };
    Kind kind = Kind::never;
    std::string name;
    std::shared_ptr<const BoundaryTable> table;  ///< band only
    double shift = 0.0;                          ///< band: added to both edges
    double param = 0.0;                          ///< t0, level a, or scale c

    static StoppingRule band(std::shared_ptr<const BoundaryTable> table, double shift = 0.0);
    static StoppingRule constant_time(double t0);
    static StoppingRule threshold(double a);
    /// stop when the gap reaches c sqrt(T - t)
    static StoppingRule scaled_threshold(double c);
    static StoppingRule never();
};

struct RuleEstimate {
    std::string name;
    Estimate value;          ///< E (B_tau - S_T)^2
    double diff_mean = 0.0;  ///< paired difference to the first rule
    double diff_stderr = 0.0;
};

/// Evaluates every rule on the same paths. Results are bit-identical for any worker count.
std::vector<RuleEstimate> evaluate_rules(const PathBatch& batch, std::span<const StoppingRule> rules, int workers = 1);

Estimate evaluate_rule(const PathBatch& batch, const StoppingRule& rule, int workers = 1);

/// Grid index at which the rule stops path `index` (n_steps if it never fires earlier).
int stopping_step(const PathBatch& batch, const StoppingRule& rule, std::uint64_t index);

/// Mean of f(B_T, S_T) over the batch.
Estimate terminal_functional(const PathBatch& batch, const std::function<double(double, double)>& f, int workers = 1);

struct LemmaBin {
    double lo, hi;
    std::size_t count;
    double lhs_mean;    ///< mean of (S_T - B_t)^2
    double lhs_stderr;
    double rhs_mean;    ///< mean of G(t, X_t) over the same paths
    double z;           ///< (lhs - rhs) / stderr
};

struct LemmaReport {
    double t;
    std::vector<LemmaBin> bins;          ///< bins with at least min_count paths
    std::vector<LemmaBin> sparse_bins;   ///< reported, not checked
    double max_abs_z = 0.0;
};

/// Conditional-mean check of E[(S_T - B_t)^2 | X_t] = G(t, X_t), binned in X_t.
LemmaReport verify_lemma21(const PathBatch& batch, double t, int n_bins = 20, std::size_t min_count = 1000,
                           int workers = 1);

/// band(table) followed by the rivals, all on the same paths.
struct RegretRow {
    RuleEstimate estimate;
    bool beats_band = false;  ///< rival below band by more than 3 paired standard errors
};
std::vector<RegretRow> regret_scan(std::shared_ptr<const BoundaryTable> table, std::span<const StoppingRule> rivals,
                                   const PathBatch& batch, int workers = 1);

/// Nine rivals: never, immediate, halfway, four thresholds, c sqrt(T - t) with c = 1.12,
/// and the band shifted up by 0.05 sqrt(T).
std::vector<StoppingRule> default_rivals(std::shared_ptr<const BoundaryTable> table);

std::string regret_csv(std::span<const RegretRow> rows, const PathBatch& batch);

}  // namespace stopmax
