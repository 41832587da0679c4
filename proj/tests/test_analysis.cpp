#include "oracles.hpp"
#include "ssb/analysis.hpp"
#include "ssb/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

using namespace ssb;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// C-infinity ramp: 0 for s <= 0, 1 for s >= 1.
double ramp(double s)
{
    auto f = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    return f(s) / (f(s) + f(1.0 - s));
}

// Steady annulus solution cut off smoothly away from 0.7 <= r <= 2.3, so it
// is smooth and periodic on [-4, 4)^2.
double cut_steady(double x, double y)
{
    const double r = std::hypot(x, y);
    if (r < 0.3 || r > 3.5)
        return 0.0;
    const double w = ramp((r - 0.3) / 0.4) * ramp((3.5 - r) / 1.2);
    return w * steady_annulus_xy(x, y);
}

} // namespace

TEST_SUITE("analysis")
{
    TEST_CASE("steady annulus profile")
    {
        for (double r : {1.0, 1.25, 1.7, 2.0})
            CHECK(steady_annulus_radial(r) == doctest::Approx(oracle::annulus_profile(r)).epsilon(1e-14));
        // no-flux rims
        CHECK(std::abs(steady_annulus_radial_derivative(1.0)) < 1e-14);
        CHECK(std::abs(steady_annulus_radial_derivative(2.0)) < 1e-14);
        const double h = 1e-6, r = 1.4;
        CHECK(steady_annulus_radial_derivative(r) ==
              doctest::Approx((oracle::annulus_profile(r + h) - oracle::annulus_profile(r - h)) / (2 * h)).epsilon(1e-7));
        // g'' + g'/r - 4 g / r^2 = r
        for (double s : {1.1, 1.5, 1.9}) {
            const double e = 1e-4;
            const double g0 = oracle::annulus_profile(s);
            const double gp = (oracle::annulus_profile(s + e) - oracle::annulus_profile(s - e)) / (2 * e);
            const double gpp = (oracle::annulus_profile(s + e) - 2 * g0 + oracle::annulus_profile(s - e)) / (e * e);
            CHECK(gpp + gp / s - 4 * g0 / (s * s) == doctest::Approx(s).epsilon(1e-6));
        }
        CHECK(steady_annulus(1.5, 0.3) == doctest::Approx(oracle::annulus_profile(1.5) * std::cos(0.6)));
        CHECK(steady_annulus_xy(0.0, 1.5) == doctest::Approx(-oracle::annulus_profile(1.5)));
        CHECK_THROWS_AS(steady_annulus_xy(0.0, 0.0), std::invalid_argument);
    }

    TEST_CASE("max of the steady solution")
    {
        CHECK(steady_annulus_max_abs() == doctest::Approx(oracle::annulus_profile_max_abs()).epsilon(1e-7));
        // the max sits on the outer rim: |g(2)| = 0.96
        CHECK(steady_annulus_max_abs() == doctest::Approx(0.96).epsilon(1e-12));
    }

    TEST_CASE("error report definitions")
    {
        const Grid2 g = make_grid(16, 16, 2.0, 2.0, -1.0, -1.0);
        const Field2 chi = sample(g, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
        auto exact = [](double x, double y) { return 0.96 * x * y; };

        SUBCASE("exact samples give zero error")
        {
            const ErrorReport r = error_report(sample(g, exact), exact, chi);
            CHECK(r.E == 0.0);
            CHECK(r.e == 0.0);
            CHECK(r.points == 112); // 7 columns with x > 0
        }
        SUBCASE("uniform offset")
        {
            const Field2 u = sample(g, [&](double x, double y) { return exact(x, y) + 0.01; });
            const ErrorReport r = error_report(u, exact, chi, 0.96);
            CHECK(r.E == doctest::Approx(0.01));
            CHECK(r.e == doctest::Approx(0.01 / 0.96));
        }
        SUBCASE("points outside are ignored")
        {
            Field2 u = sample(g, exact);
            u(0, 3) = 1e6; // x = -1
            const ErrorReport r = error_report(u, exact, chi);
            CHECK(r.E == 0.0);
            CHECK(r.error(0, 3) == 0.0);
        }
        SUBCASE("E is the max of the stored error field")
        {
            const Field2 u = sample(g, [&](double x, double y) { return exact(x, y) + std::sin(7 * x * y); });
            const ErrorReport r = error_report(u, exact, chi);
            double m = 0.0;
            for (double v : r.error.data())
                m = std::max(m, v);
            CHECK(r.E == m);
        }
        SUBCASE("empty domain")
        {
            CHECK_THROWS_AS(error_report(Field2(g), exact, Field2(g)), std::invalid_argument);
        }
    }

    TEST_CASE("interpolation is exact for bilinear functions and wraps")
    {
        const Grid2 g = make_grid(8, 8, 1.0, 1.0);
        const Field2 f = sample(g, [](double x, double y) { return 1 + 2 * x + 3 * y + 4 * x * y; });
        CHECK(interpolate(f, 0.31, 0.47) == doctest::Approx(1 + 2 * 0.31 + 3 * 0.47 + 4 * 0.31 * 0.47));
        CHECK(interpolate(f, g.x(3), g.y(5)) == doctest::Approx(f(3, 5)));
        CHECK(interpolate(f, 1.0 + g.x(2), g.y(1)) == doctest::Approx(f(2, 1)));
    }

    TEST_CASE("boundary flux of constants is zero")
    {
        const Shape a = presets::annulus();
        const Grid2 g = enlarged_domain(a, 0.1, 64);
        const PhaseField pf = uniform_phase_field(g, 0.1);
        CHECK(boundary_flux(Field2(g, 2.0), pf, a, 200) < 1e-12);
        RasterMask mask;
        CHECK_THROWS_AS(boundary_flux(Field2(g), Domain(mask), 10), std::invalid_argument);
    }

    TEST_CASE("boundary flux of the exact solution converges at second order")
    {
        const Shape a = presets::annulus();
        std::vector<double> flux;
        for (int n : {64, 128, 256}) {
            const Grid2 g = make_grid(n, n, 8.0, 8.0, -4.0, -4.0);
            flux.push_back(boundary_flux(sample(g, cut_steady), uniform_phase_field(g, 0.1), a, 8 * n));
        }
        CAPTURE(flux[0]);
        CAPTURE(flux[1]);
        CAPTURE(flux[2]);
        CHECK(flux[1] < flux[0]);
        CHECK(flux[2] < flux[1]);
        CHECK(std::log2(flux[1] / flux[2]) >= 1.8);
    }

    TEST_CASE("reference solver")
    {
        SUBCASE("heat on cos x to O(dx^2)")
        {
            for (int n : {16, 32}) {
                const Grid2 g = make_grid(n, n, kTwoPi, kTwoPi);
                const auto u = reference_solve(pure_diffusion(1.0), {sample(g, [](double x, double) { return std::cos(x); })},
                                               1.0, 0.01, 10);
                double err = 0.0;
                for (int i = 0; i < n; ++i)
                    err = std::max(err, std::abs(u[0](i, 0) - std::exp(-1.0) * std::cos(g.x(i))));
                const double h = g.dx();
                CAPTURE(n);
                CHECK(err < 0.1 * h * h);
                CHECK(err > 0.01 * h * h);
            }
        }
        SUBCASE("zero stays zero")
        {
            const Grid2 g = make_grid(16, 16, 1.0, 1.0);
            const auto u = reference_solve(allen_cahn(0.1), {Field2(g)}, 1.0, 0.01, 4);
            CHECK(u[0].max_abs() == 0.0);
        }
        SUBCASE("agrees with the independent oracle")
        {
            const Grid2 g = make_grid(16, 16, kTwoPi, kTwoPi);
            const Field2 u0 = sample(g, [](double x, double y) { return 0.5 * std::sin(x) * std::cos(2 * y); });
            const auto u = reference_solve(allen_cahn(0.3), {u0}, 0.5, 0.01, 5);
            const oracle::Grid og{16, 16, kTwoPi, kTwoPi};
            const auto o = oracle::central_difference_solve(og, {u0.data().begin(), u0.data().end()}, 0.09,
                                                            [](double v) { return v - v * v * v; }, 0.5, 0.002);
            double diff = 0.0;
            for (std::size_t k = 0; k < o.size(); ++k)
                diff = std::max(diff, std::abs(o[k] - u[0][k]));
            CHECK(diff < 1e-13);
        }
        SUBCASE("unstable refinement is refused")
        {
            const Grid2 g = make_grid(64, 64, 1.0, 1.0);
            CHECK_THROWS_AS(reference_solve(pure_diffusion(1.0), {Field2(g)}, 1.0, 0.01, 1), Error);
        }
    }

    TEST_CASE("resolution from eta")
    {
        const Box box = bounding_box(presets::annulus());
        CHECK(resolution_for_eta(box, 0.05, 1.5) == 150);
        CHECK(resolution_for_eta(box, 0.05, 4.0) == 400);
        CHECK(resolution_for_eta(box, 0.05, 5.0) == 500);
        CHECK(resolution_for_eta(box, 0.10, 1.5) == 90);
        CHECK(resolution_for_eta(box, 0.10, 5.0) == 300);
        CHECK(resolution_for_eta(box, 0.025, 1.5) == 270);
        CHECK(resolution_for_eta(box, 0.025, 5.0) == 900);
        CHECK(resolution_for_eta(box, 0.025, 4.0) == 720);
    }

    TEST_CASE("sweep: order, reproducibility and failures")
    {
        SweepOptions opt;
        opt.t_final = 0.05;
        opt.jobs = 2;
        const auto a = convergence_sweep("annulus", {0.2, 0.15}, {2.0, 2.5}, opt);
        opt.jobs = 1;
        const auto b = convergence_sweep("annulus", {0.2, 0.15}, {2.0, 2.5}, opt);
        REQUIRE(a.size() == 4);
        CHECK(a[0].xi == 0.2);
        CHECK(a[1].eta == 2.5);
        CHECK(a[2].xi == 0.15);
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k].failure.empty());
            CHECK(a[k].E == b[k].E);
            CHECK(a[k].e == b[k].e);
            CHECK(a[k].N == b[k].N);
        }
        const auto bad = convergence_sweep("annulus", {-0.1, 0.2}, {2.0}, opt);
        CHECK_FALSE(bad[0].failure.empty());
        CHECK(std::isnan(bad[0].e));
        CHECK(bad[1].failure.empty());
        CHECK_THROWS_AS(convergence_sweep("circle", {0.1}, {2.0}), std::invalid_argument);

        std::ostringstream csv;
        write_sweep_csv(csv, a);
        CHECK(csv.str().rfind("xi,eta,N,t_final,E,e,wall_seconds\n", 0) == 0);
    }
}
