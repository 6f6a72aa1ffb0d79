#pragma once

#include <cstdint>
#include <vector>

#include "stopmax/problem_spec.hpp"

/**
 * Expectations of functionals of the gap process X^x_u = x v S_u - B_u.
 *
 *   J(t, x)            = E G(T, X^x_{T-t}) = E (X^x_{T-t})^2
 *   K(t, x, t+u, y, z) = E H(t+u, X^x_u) 1{y < X^x_u < z}
 *   L(t, x, t+u, y)    = E H(t+u, X^x_u) 1{X^x_u > y}
 *
 * The production route integrates against the closed-form density of X^x_u
 * (one dimension). The tensor route integrates against the joint density of
 * (B_u, S_u) in the coordinates (s, m = 2s - b) and is kept as an independent check.
 */
namespace stopmax {

struct KernelOptions {
    int quad_order = 32;
    double width_sd = 10.0;    ///< half-width of the integration window in sqrt(u)
    double panel_sd = 4.0;     ///< panel width in sqrt(u)
};

double kernel_J(const ProblemSpec& spec, double t, double x, const KernelOptions& opt = {});

double kernel_K(const ProblemSpec& spec, double t, double x, double u, double y, double z,
                const KernelOptions& opt = {});

double kernel_L(const ProblemSpec& spec, double t, double x, double u, double y,
                const KernelOptions& opt = {});

/// K with z = +inf allowed (then equal to L).
double kernel_band(const ProblemSpec& spec, double t, double x, double u, double y, double z,
                   const KernelOptions& opt = {});

/// E_x phi(X_u) restricted to y < X_u < z, by the two-dimensional route over the
/// joint density of (B_u, S_u). Slow; for cross-checks.
template <class Phi>
double tensor_expectation(const ProblemSpec& spec, double x, double u, double y, double z, Phi&& phi,
                          int order = 32);

double kernel_J_tensor(const ProblemSpec& spec, double t, double x, int order = 32);
double kernel_K_tensor(const ProblemSpec& spec, double t, double x, double u, double y, double z,
                       int order = 32);

/// Exact draws of X^x_u: B_u is Gaussian and, given B_u = b, the maximum of the
/// bridge is (b + sqrt(b^2 - 2u log U)) / 2.
std::vector<double> sample_X(const ProblemSpec& spec, double x, double u, std::size_t count,
                             std::uint64_t seed);

/// Exact draws of (B_u, S_u), the building block of sample_X.
struct JointDraw {
    double b;
    double s;
};
std::vector<JointDraw> sample_joint(const ProblemSpec& spec, double u, std::size_t count, std::uint64_t seed);

}  // namespace stopmax

#include "stopmax/detail/tensor_route.hpp"
