#pragma once

#include <vector>

#include "stopmax/problem_spec.hpp"

/**
 * Brute-force backward induction for V(t, x) = inf_tau E G(t + tau, X_tau):
 *   V_n = G(T, .),  V_k = min(G(t_k, .), E V_{k+1}(X^x_dt))
 * on a uniform level grid, with V_{k+1} interpolated by cubic Lagrange weights between levels and the
 * expectation taken against the transition density of the gap process.
 */
namespace stopmax {

struct DpConfig {
    int n_steps = 1000;
    int n_levels = 256;
    double x_max = 0.0;  ///< 0 selects 4 sqrt(T) + 2 |mu| T
    int quad_order = 16;
};

struct DpResult {
    std::vector<double> times;
    std::vector<double> levels;
    std::vector<double> lower_edge;  ///< NaN where no level stops
    std::vector<double> upper_edge;  ///< +inf when the stopping set reaches the top level
    std::vector<double> value0;      ///< V(0, level)
    double cell = 0.0;

    double value_at_zero(double x) const;
};

DpResult solve_dp(const ProblemSpec& spec, const DpConfig& config = {});

}  // namespace stopmax
