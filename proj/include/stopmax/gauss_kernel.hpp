#pragma once

#include "stopmax/problem_spec.hpp"

/**
 * Closed-form laws of the drifted maximum.
 *
 * With B^mu_t = B_t + mu t and S^mu_t its running maximum:
 *   - max_cdf:       P(S^mu_tau <= z)
 *   - joint_density: density of (B^mu_t, S^mu_t) at (b, s), b <= s, s >= 0
 *   - gap_density / gap_cdf: law of the gap x v S^mu_u - B^mu_u started from x,
 *     obtained by integrating joint_density over the maximum; this is Brownian
 *     motion with drift -mu reflected at zero.
 */
namespace stopmax {

double max_cdf(const ProblemSpec& spec, double tau, double z);

/// 1 - max_cdf, computed without cancellation.
double max_survival(double mu, double tau, double z);

double joint_density(const ProblemSpec& spec, double t, double b, double s);

/// Density of x v S^mu_u - B^mu_u at w >= 0, for u > 0.
double gap_density(double mu, double u, double x, double w);

/// P(x v S^mu_u - B^mu_u <= w).
double gap_cdf(double mu, double u, double x, double w);

/// Interval outside of which the gap density carries less than ~1e-17 of mass.
struct GapWindow {
    double lo;
    double hi;
};
GapWindow gap_window(double mu, double u, double x, double width_sd = 9.0);

}  // namespace stopmax
