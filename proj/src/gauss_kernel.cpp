#include "stopmax/gauss_kernel.hpp"

#include <algorithm>
#include <cmath>

#include "stopmax/normal.hpp"

namespace stopmax {

namespace {
constexpr double kSqrt2OverPi = 0.79788456080286535588;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double max_survival(double mu, double tau, double z) {
    if (tau <= 0.0) return z >= 0.0 ? 0.0 : 1.0;
    const double s = std::sqrt(tau);
    const double r = std_normal_cdf(-(z - mu * tau) / s) + exp_times_cdf(2.0 * mu * z, (-z - mu * tau) / s);
    return std::clamp(r, 0.0, 1.0);
}

double max_cdf(const ProblemSpec& spec, double tau, double z) {
    if (!(tau >= 0.0 && tau <= spec.horizon * (1.0 + 1e-12)))
        throw DomainError("max_cdf: tau outside [0, T]");
    require_level(z, "max_cdf: z");
    if (tau == 0.0) return 1.0;
    const double s = std::sqrt(tau);
    const double a = (z - spec.mu * tau) / s;
    double f;
    if (a > 0.0) {
        f = 1.0 - max_survival(spec.mu, tau, z);
    } else {
        f = std_normal_cdf(a) - exp_times_cdf(2.0 * spec.mu * z, (-z - spec.mu * tau) / s);
    }
    return std::clamp(f, 0.0, 1.0);
}

double joint_density(const ProblemSpec& spec, double t, double b, double s) {
    if (!(t > 0.0)) throw DomainError("joint_density: t must be > 0");
    require_level(s, "joint_density: s");
    if (b > s) throw DomainError("joint_density: requires b <= s");
    const double m = 2.0 * s - b;
    const double mu = spec.mu;
    return kSqrt2OverPi / (t * std::sqrt(t)) * m * std::exp(-m * m / (2.0 * t) + mu * (b - 0.5 * mu * t));
}

double gap_density(double mu, double u, double x, double w) {
    if (w < 0.0) return 0.0;
    const double s = std::sqrt(u);
    const double direct = std_normal_pdf((w - x + mu * u) / s);
    const double m = (w + x + mu * u) / s;
    const double mirror = kInvSqrt2Pi * std::exp(2.0 * mu * x - 0.5 * m * m);
    const double reflect = 2.0 * mu * exp_times_cdf(-2.0 * mu * w, (mu * u - w - x) / s);
    return (direct + mirror) / s + reflect;
}

double gap_cdf(double mu, double u, double x, double w) {
    if (w <= 0.0) return 0.0;
    if (u <= 0.0) return x <= w ? 1.0 : 0.0;
    const double s = std::sqrt(u);
    const double c = std_normal_cdf((w - x + mu * u) / s) - exp_times_cdf(-2.0 * mu * w, (mu * u - w - x) / s);
    return std::clamp(c, 0.0, 1.0);
}

GapWindow gap_window(double mu, double u, double x, double width_sd) {
    const double s = std::sqrt(u);
    const double centre = x - mu * u;
    // Mass pushed against zero by a positive drift decays like exp(-2 mu w).
    const double pile = mu > 0.0 ? std::min(width_sd * s, 20.0 / mu) : 0.0;
    const double lo = std::max(0.0, centre - width_sd * s);
    const double hi = std::max(centre, 0.0) + width_sd * s + pile;
    return {lo, hi};
}

}  // namespace stopmax
