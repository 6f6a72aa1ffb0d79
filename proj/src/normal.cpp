#include "stopmax/normal.hpp"

#include <cmath>
#include <numbers>

namespace stopmax {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kHalfLog2Pi = 0.91893853320467274178;
}  // namespace

double std_normal_cdf(double u) {
    return 0.5 * std::erfc(-u * kInvSqrt2);
}

double std_normal_pdf(double u) {
    return kInvSqrt2Pi * std::exp(-0.5 * u * u);
}

double std_normal_log_cdf(double u) {
    if (u > 0.0) return std::log1p(-0.5 * std::erfc(u * kInvSqrt2));
    if (u > -30.0) return std::log(0.5 * std::erfc(-u * kInvSqrt2));
    // Mills-ratio series: Phi(u) = phi(u)/|u| * (1 - 1/u^2 + 3/u^4 - 15/u^6 + 105/u^8 - ...)
    const double r = 1.0 / (u * u);
    const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r * (1.0 - 9.0 * r))));
    return -0.5 * u * u - std::log(-u) - kHalfLog2Pi + std::log(series);
}

double exp_times_cdf(double a, double u) {
    if (a < 700.0 && u > -37.0) {
        const double direct = std::exp(a) * std_normal_cdf(u);
        if (direct > 1e-300 && std::isfinite(direct)) return direct;
    }
    return std::exp(a + std_normal_log_cdf(u));
}

}  // namespace stopmax
