#pragma once

#include <span>
#include <string>
#include <vector>

#include "stopmax/boundary_solver.hpp"

namespace stopmax {

enum class Region { continuation, stopping };

/// v is the integral representation projected onto V <= G; v_raw is the
/// representation itself, which may overshoot G by the O(h) scheme error near a band edge.
struct ValueResult {
    double v = 0.0;
    double v_raw = 0.0;
    double g = 0.0;
    Region region = Region::continuation;
};

/// Which value the u = 0 term of the time quadrature takes at a band edge.
enum class EdgeRule {
    automatic,  ///< 1 inside the band, 1/2 on an edge, 0 outside (the solver's convention)
    outside,    ///< always 0: the continuation-side limit, used for one-sided slopes
};

/// V(t, x) = J(t, x) - int_0^{T-t} K(t, x, t+u, b1(t+u), b2(t+u)) du with the trapezoid
/// rule on the table's grid; L replaces K when b2 is infinite.
double represent_value(const BoundaryTable& table, double t, double x, EdgeRule edge = EdgeRule::automatic);

ValueResult value_at(const ProblemSpec& spec, const BoundaryTable& table, double t, double x);

/// g - v <= tol (1 + g) counts as stopping.
inline constexpr double kClassificationTol = 1e-4;

struct SmoothFitProbe {
    double t;
    int boundary;        ///< 1 or 2
    double level;
    double v_x;          ///< one-sided slope from the continuation side
    double g_x;
    double discrepancy;  ///< |v_x - g_x|
    bool near_horizon;   ///< within five grid steps of T, where tolerances are not asserted
};

struct ReflectionProbe {
    double t;
    double v_x;  ///< slope at 0+
};

struct DiagnosticReport {
    std::vector<SmoothFitProbe> smooth_fit;
    std::vector<ReflectionProbe> reflection;
    double max_v_minus_g = -1e300;      ///< after projection; never positive
    double max_raw_v_minus_g = -1e300;  ///< representation overshoot
    double max_decrease_in_x = 0.0;  ///< largest drop of V between neighbouring probe levels
};

DiagnosticReport diagnostics(const ProblemSpec& spec, const BoundaryTable& table, std::span<const double> probe_times,
                             std::span<const double> probe_levels, double fd_step = 1e-3);

/// CSV body `t,x,V,G,region` on the product grid.
std::string value_surface_csv(const ProblemSpec& spec, const BoundaryTable& table, std::span<const double> times,
                              std::span<const double> levels);

std::string diagnostics_csv(const DiagnosticReport& report);

}  // namespace stopmax
