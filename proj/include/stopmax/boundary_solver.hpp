#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stopmax/expectation_kernels.hpp"
#include "stopmax/problem_spec.hpp"

namespace stopmax {

struct SolverConfig {
    int n_steps = 200;
    int quad_order = 32;
    double root_tol = 1e-8;
    double level_tol = 1e-7;
    double merge_gap = 1e-5;

    void validate() const;
    KernelOptions kernel_options() const;
    bool operator==(const SolverConfig&) const = default;
};

struct MonotonicityViolation {
    int index;          ///< grid index k where b_i(t_k) and b_i(t_{k+1}) are out of order
    int boundary;       ///< 1 or 2
    double amount;
};

/// Solved stopping band {b1(t) <= x <= b2(t)} on the uniform grid t_k = k T / n.
/// Times before t_star carry NaN boundaries; b2 is +inf when mu <= 0.
struct BoundaryTable {
    ProblemSpec spec;
    SolverConfig config;
    std::vector<double> times;
    std::vector<double> b1;
    std::vector<double> b2;
    double t_star = 0.0;
    int first_band_index = 0;          ///< smallest k with a band
    std::optional<double> z_star;      ///< argmax of b1 when mu <= 0
    std::vector<MonotonicityViolation> violations;

    std::size_t size() const { return times.size(); }
    bool has_band(std::size_t k) const { return static_cast<int>(k) >= first_band_index; }
    double step() const { return spec.horizon / static_cast<double>(times.size() - 1); }

    /// Band edges at an arbitrary time by linear interpolation; nullopt before the band exists.
    struct Band {
        double lo;
        double hi;
    };
    std::optional<Band> band_at(double t) const;
};

/// J(t, x) - G(t, x).
double residual_I(const ProblemSpec& spec, double t, double x, const KernelOptions& opt = {});

/// Discretized boundary equation at grid index k as a function of the level xi:
///   J - G - h (H/4 + sum_{k<j<n} K_j + K_n / 2)
/// which is negative in the continuation set and positive inside the band.
class StepEquation {
public:
    StepEquation(const BoundaryTable& table, int k, KernelOptions opt);
    double operator()(double xi) const;

private:
    const BoundaryTable& table_;
    int k_;
    KernelOptions opt_;
};

BoundaryTable solve_boundaries(const ProblemSpec& spec, const SolverConfig& config);

/// |equation(b_i(t_k))| for every banded grid time; index 0 holds b1, index 1 b2 (NaN if absent).
struct DefectReport {
    std::vector<double> b1;
    std::vector<double> b2;
    double max_defect = 0.0;
};
DefectReport volterra_defect(const BoundaryTable& table);

struct ConvergenceLevel {
    int n_steps;
    double t_star;
    double max_diff_to_next;  ///< max |b^(n) - b^(next n)| on shared grid times; NaN for the last level
};
struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;
    bool differences_decrease = false;
};
ConvergenceReport refine_convergence(const ProblemSpec& spec, const SolverConfig& config,
                                     const std::vector<int>& factors);

/// CSV body `t,b1,b2` (12 significant digits, `inf` for an infinite b2, empty before t_star).
std::string boundary_csv(const BoundaryTable& table);

/// Rebuilds a table from a CSV body and the problem it was solved for.
BoundaryTable parse_boundary_csv(const std::string& body, const ProblemSpec& spec, const SolverConfig& config);

}  // namespace stopmax
