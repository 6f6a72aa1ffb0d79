#include "stopmax/expectation_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stopmax/gain_model.hpp"
#include "stopmax/gauss_kernel.hpp"
#include "stopmax/quadrature.hpp"
#include "stopmax/random.hpp"

namespace stopmax {

namespace {

void check_lookahead(const ProblemSpec& spec, double t, double x, double u) {
    const double tau = time_to_go(spec, t);
    require_level(x, "kernel: x");
    if (!(u > 0.0)) throw DomainError("kernel: lookahead u must be > 0");
    if (u > tau * (1.0 + 1e-12) + 1e-15) throw DomainError("kernel: t + u exceeds T");
}

// Integral of phi(w) p(u; x, w) over (y, z) intersected with the mass window of p.
// Extra cuts resolve H(t + u, .) near zero when little time is left after t + u.
template <class Phi>
double gap_expectation(double mu, double x, double u, double y, double z, double feature_scale, Phi&& phi,
                       const KernelOptions& opt) {
    const GapWindow win = gap_window(mu, u, x, opt.width_sd);
    const double a = std::max(y, win.lo);
    const double b = std::min(z, win.hi);
    if (!(b > a)) return 0.0;
    const double su = std::sqrt(u);
    double cuts[12];
    int n = 0;
    cuts[n++] = a;
    if (feature_scale > 0.0 && feature_scale < su) {
        for (double k : {0.5, 1.0, 2.0, 3.0, 5.0, 8.0}) {
            const double c = k * feature_scale;
            if (c > a && c < b) cuts[n++] = c;
        }
    }
    const double centre = x - mu * u;
    if (centre > a && centre < b) cuts[n++] = centre;
    cuts[n++] = b;
    std::sort(cuts, cuts + n);
    const auto& rule = quad::gauss_legendre(opt.quad_order);
    auto f = [&](double w) { return phi(w) * gap_density(mu, u, x, w); };
    // The density varies on the scale sqrt(u) near zero as well as in the bulk.
    return quad::integrate_panels(rule, f, std::span<const double>(cuts, static_cast<std::size_t>(n)),
                                  opt.panel_sd * su);
}

}  // namespace

double kernel_J(const ProblemSpec& spec, double t, double x, const KernelOptions& opt) {
    const double tau = time_to_go(spec, t);
    require_level(x, "kernel_J: x");
    if (tau == 0.0) return x * x;
    return gap_expectation(spec.mu, x, tau, 0.0, std::numeric_limits<double>::infinity(), 0.0,
                           [](double w) { return w * w; }, opt);
}

double kernel_band(const ProblemSpec& spec, double t, double x, double u, double y, double z,
                   const KernelOptions& opt) {
    check_lookahead(spec, t, x, u);
    require_level(y, "kernel: y");
    if (!(z > y)) throw DomainError("kernel: band requires y < z");
    const double t_next = std::min(spec.horizon, t + u);
    const double rest = spec.horizon - t_next;
    return gap_expectation(spec.mu, x, u, y, z, std::sqrt(std::max(rest, 0.0)),
                           [&](double w) { return h_function(spec, t_next, w); }, opt);
}

double kernel_K(const ProblemSpec& spec, double t, double x, double u, double y, double z,
                const KernelOptions& opt) {
    if (!std::isfinite(z)) throw DomainError("kernel_K: z must be finite (use kernel_L)");
    return kernel_band(spec, t, x, u, y, z, opt);
}

double kernel_L(const ProblemSpec& spec, double t, double x, double u, double y, const KernelOptions& opt) {
    return kernel_band(spec, t, x, u, y, std::numeric_limits<double>::infinity(), opt);
}

double kernel_J_tensor(const ProblemSpec& spec, double t, double x, int order) {
    const double tau = time_to_go(spec, t);
    if (tau == 0.0) return x * x;
    return tensor_expectation(spec, x, tau, -1.0, std::numeric_limits<double>::infinity(),
                              [](double w) { return w * w; }, order);
}

double kernel_K_tensor(const ProblemSpec& spec, double t, double x, double u, double y, double z, int order) {
    check_lookahead(spec, t, x, u);
    const double t_next = std::min(spec.horizon, t + u);
    return tensor_expectation(spec, x, u, y, z, [&](double w) { return h_function(spec, t_next, w); }, order);
}

std::vector<JointDraw> sample_joint(const ProblemSpec& spec, double u, std::size_t count, std::uint64_t seed) {
    if (!(u > 0.0)) throw DomainError("sample: u must be > 0");
    if (count == 0) throw DomainError("sample: count must be >= 1");
    const rng::Philox4x32 gen(seed);
    const double su = std::sqrt(u);
    std::vector<JointDraw> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto r = gen.at(7, i, 0);
        const double b = spec.mu * u + su * rng::box_muller(r[0], r[1])[0];
        const double s = 0.5 * (b + std::sqrt(b * b - 2.0 * u * std::log(rng::to_unit(r[2]))));
        out[i] = {b, s};
    }
    return out;
}

std::vector<double> sample_X(const ProblemSpec& spec, double x, double u, std::size_t count, std::uint64_t seed) {
    require_level(x, "sample_X: x");
    const auto joint = sample_joint(spec, u, count, seed);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = std::max(x, joint[i].s) - joint[i].b;
    return out;
}

}  // namespace stopmax
