#include <doctest.h>

#include <cmath>
#include <set>

#include "stopmax/normal.hpp"
#include "stopmax/quadrature.hpp"
#include "stopmax/random.hpp"
#include "stopmax/roots.hpp"

using namespace stopmax;

// Reference values from 40-digit mpmath evaluations.
TEST_SUITE("numerics") {

TEST_CASE("normal cdf at reference points") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std::abs(std_normal_cdf(1.0) - 0.8413447460685429486) < 1e-15);
    CHECK(std::abs(std_normal_cdf(40.0) - 1.0) <= 1e-15);
    CHECK(std::abs(std_normal_cdf(-10.0) / 7.619853024160526066e-24 - 1.0) < 1e-13);
    CHECK(std::abs(std_normal_cdf(-20.0) / 2.753624118606233695e-89 - 1.0) < 1e-13);
}

TEST_CASE("normal cdf is monotone across the tails") {
    double prev = 0.0;
    for (double u = -38.0; u <= 9.0; u += 0.01) {
        const double p = std_normal_cdf(u);
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("normal pdf") {
    CHECK(std::abs(std_normal_pdf(0.0) - 0.3989422804014327) < 1e-16);
    CHECK(std_normal_pdf(-1.3) == std_normal_pdf(1.3));
    CHECK(std::abs(std_normal_pdf(2.0) - 0.05399096651318805195) < 1e-16);
    // derivative of the cdf
    const double h = 1e-5;
    CHECK(std::abs((std_normal_cdf(2.0 + h) - std_normal_cdf(2.0 - h)) / (2 * h) - std_normal_pdf(2.0)) < 1e-10);
}

TEST_CASE("log cdf in the deep lower tail") {
    CHECK(std::abs(std_normal_log_cdf(-35.0) - (-616.9751012619225135)) < 1e-11);
    CHECK(std::abs(std_normal_log_cdf(-40.0) - (-804.6084420137537882)) < 1e-11);
    CHECK(std::abs(std_normal_log_cdf(3.0) - (-0.001350809964748193799)) < 1e-16);
    // continuity where the asymptotic series takes over
    CHECK(std::abs(std_normal_log_cdf(-30.0 - 1e-9) - std_normal_log_cdf(-30.0 + 1e-9)) < 1e-6);
}

TEST_CASE("exp times cdf avoids overflow and underflow") {
    CHECK(std::abs(exp_times_cdf(800.0, -40.0) / 0.0099673351883013099835 - 1.0) < 1e-11);
    CHECK(std::abs(exp_times_cdf(-2.0, 0.3) - 0.08362521733708006903) < 1e-16);
    CHECK(exp_times_cdf(-800.0, -40.0) == 0.0);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    for (int n : {1, 2, 5, 16, 32, 64}) {
        const auto& r = quad::gauss_legendre(n);
        double wsum = 0.0;
        for (double w : r.weights) wsum += w;
        CHECK(std::abs(wsum - 2.0) < 1e-13);
        const int deg = 2 * n - 1;
        const double v = quad::integrate_rule(r, [&](double x) { return std::pow(x, deg) + std::pow(x, deg - 1); }, 0.0, 1.0);
        CHECK(std::abs(v - (1.0 / (deg + 1) + 1.0 / deg)) < 1e-12);
    }
    CHECK_THROWS(quad::gauss_legendre(0));
}

TEST_CASE("adaptive quadrature meets its tolerance on a peaked integrand") {
    auto f = [](double x) { return std::exp(-1e4 * (x - 0.3) * (x - 0.3)); };
    const auto r = quad::integrate_adaptive(f, 0.0, 1.0, 1e-12);
    CHECK(r.converged);
    CHECK(std::abs(r.value - std::sqrt(M_PI) / 100.0) < 1e-11);
}

TEST_CASE("composite panels respect breakpoints") {
    auto step = [](double x) { return x < 0.5 ? 1.0 : 3.0; };
    const double bp[] = {0.0, 0.5, 1.0};
    CHECK(std::abs(quad::integrate_panels(quad::gauss_legendre(4), step, bp, 0.1) - 2.0) < 1e-14);
}

TEST_CASE("brent finds roots and rejects bad brackets") {
    auto f = [](double x) { return std::cos(x) - x; };
    const auto r = roots::brent(f, 0.0, 1.0, 1e-14, 1e-15);
    CHECK(r.converged);
    CHECK(std::abs(r.x - 0.7390851332151607) < 1e-13);
    CHECK_THROWS_AS(roots::brent(f, 1.0, 2.0, 1e-10, 1e-10), BracketError);

    auto cubic = [](double x) { return (x - 1.0) * (x - 1.0) * (x - 1.0); };
    const auto c = roots::brent(cubic, 0.0, 3.0, 1e-10, 1e-20);
    CHECK(std::abs(c.x - 1.0) < 1e-6);
}

TEST_CASE("bisection and golden section") {
    auto f = [](double x) { return x * x - 2.0; };
    const auto r = roots::bisect(f, 0.0, 2.0, 1e-12, 1e-10);
    CHECK(std::abs(r.x - std::sqrt(2.0)) < 1e-11);
    auto [x, fx] = roots::golden_section_max([](double v) { return -(v - 0.25) * (v - 0.25); }, -1.0, 2.0, 1e-9);
    CHECK(std::abs(x - 0.25) < 1e-8);
    CHECK(fx <= 0.0);
}

TEST_CASE("Philox is deterministic and counter-sensitive") {
    const rng::Philox4x32 a(42), b(42), c(43);
    CHECK(a.at(1, 7, 3) == b.at(1, 7, 3));
    CHECK(a.at(1, 7, 3) != c.at(1, 7, 3));
    CHECK(a.at(1, 7, 3) != a.at(1, 8, 3));
    CHECK(a.at(1, 7, 3) != a.at(2, 7, 3));
    std::set<std::uint32_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(a.at(0, i, 0)[0]);
    CHECK(seen.size() == 1000);
}

TEST_CASE("uniforms and normals have the right moments") {
    const rng::Philox4x32 g(7);
    double su = 0.0, sz = 0.0, sz2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const auto r = g.at(3, static_cast<std::uint64_t>(i), 0);
        const double u = rng::to_unit(r[0]);
        CHECK((u > 0.0 && u < 1.0));
        su += u;
        const auto z = rng::box_muller(r[1], r[2]);
        sz += z[0] + z[1];
        sz2 += z[0] * z[0] + z[1] * z[1];
    }
    CHECK(std::abs(su / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(sz / (2.0 * n)) < 4.0 / std::sqrt(2.0 * n));
    CHECK(std::abs(sz2 / (2.0 * n) - 1.0) < 4.0 * std::sqrt(2.0 / (2.0 * n)));
}

}
