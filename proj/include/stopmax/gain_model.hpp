#pragma once

#include <optional>
#include <span>
#include <vector>

#include "stopmax/problem_spec.hpp"

namespace stopmax {

/// G(t, x) = x^2 + 2 int_x^inf z (1 - F(T - t, z)) dz: expected squared distance to
/// the ultimate maximum when stopping now with gap x.
double gain(const ProblemSpec& spec, double t, double x);

/// dG/dt; rejects t = T.
double gain_t(const ProblemSpec& spec, double t, double x);

/// dG/dx = 2x F(T - t, x).
double gain_x(const ProblemSpec& spec, double t, double x);

/// d2G/dx2 = 2F + 2x dF/dz.
double gain_xx(const ProblemSpec& spec, double t, double x);

/// H = G_t - mu G_x + G_xx / 2. At t = T the pointwise limit 1 - 2 mu x (x > 0), -1 (x = 0).
double h_function(const ProblemSpec& spec, double t, double x);

/// dH/dt; rejects t = T.
double h_time_derivative(const ProblemSpec& spec, double t, double x);

/// Zeros of x -> H(t, x) at one time.
struct GammaPoint {
    bool exists = false;
    double gamma1 = 0.0;
    double gamma2 = 0.0;  ///< +inf when mu <= 0
};

GammaPoint gamma_at(const ProblemSpec& spec, double t);

/// gamma1 <= x <= gamma2 is where H >= 0.
struct GammaCurves {
    std::vector<double> times;
    std::vector<double> gamma1;  ///< NaN before u_star
    std::vector<double> gamma2;  ///< NaN before u_star, +inf when mu <= 0
    double u_star = 0.0;
    std::optional<double> w_star;  ///< argmax of gamma1 when mu <= 0
};

GammaCurves gamma_curves(const ProblemSpec& spec, std::span<const double> grid);

/// Earliest time at which H(t, .) reaches zero (mu > 0), to within t_tol.
double locate_u_star(const ProblemSpec& spec, double t_tol = 1e-6);

}  // namespace stopmax
