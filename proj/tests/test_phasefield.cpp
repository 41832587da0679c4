#include "oracles.hpp"
#include "ssb/error.hpp"
#include "ssb/geometry.hpp"
#include "ssb/phasefield.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace ssb;

namespace {

// Setup with a plane interface at x = 0: the domain is [-1, 0] x [-1, 1], and
// rows near y = 0 see a 1D step.
struct StepCase {
    Grid2 grid;
    PhaseField pf;
    int row;
};

StepCase step_case(double xi, double eta_target)
{
    const Shape rect = Shape::rectangle(-1.0, 0.0, -1.0, 1.0);
    const double side = enlarged_side(bounding_box(rect), xi);
    int n = static_cast<int>(std::lround(eta_target * side / xi));
    n += n % 2;
    const Grid2 g = enlarged_domain(rect, xi, n);
    int row = 0;
    for (int j = 0; j < g.ny(); ++j)
        if (std::abs(g.y(j)) < std::abs(g.y(row)))
            row = j;
    return {g, smooth(rasterize(rect, g), xi), row};
}

// Linear interpolation of the x where the row profile crosses `level`
// (profile decreasing across the interface at x = 0).
double crossing(const StepCase& c, double level)
{
    const Grid2& g = c.grid;
    for (int i = 0; i + 1 < g.nx(); ++i) {
        const double a = c.pf.phi(i, c.row), b = c.pf.phi(i + 1, c.row);
        if (g.x(i) > -0.5 && a >= level && b < level)
            return g.x(i) + (a - level) / (a - b) * g.dx();
    }
    FAIL("no crossing");
    return 0.0;
}

} // namespace

TEST_SUITE("phasefield")
{
    TEST_CASE("kernel has unit mass")
    {
        const Grid2 g = make_grid(64, 64, 3.0, 3.0);
        const Field2 k = gaussian_kernel(g, 0.2);
        double sum = 0.0;
        for (double v : k.data())
            sum += v;
        CHECK(sum * g.dx() * g.dy() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(k(0, 0) > k(1, 0));
        CHECK(k(1, 0) == doctest::Approx(k(g.nx() - 1, 0)).epsilon(1e-15));
    }

    TEST_CASE("phi equals a brute-force periodic convolution")
    {
        const Grid2 g = make_grid(32, 32, 4.0, 4.0, -2.0, -2.0);
        const double xi = 0.12;
        const Field2 chi = rasterize(Shape::circle(0.1, 0.0, 0.6), g);
        const Field2 k = gaussian_kernel(g, xi);
        const PhaseField pf = smooth(chi, xi);
        double err = 0.0;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                double acc = 0.0;
                for (int q = 0; q < g.ny(); ++q)
                    for (int p = 0; p < g.nx(); ++p)
                        acc += chi(p, q) * k((i - p + g.nx()) % g.nx(), (j - q + g.ny()) % g.ny());
                err = std::max(err, std::abs(std::min(acc * g.dx() * g.dy(), 1.0) - pf.phi(i, j)));
            }
        CHECK(err < 1e-14);
    }

    TEST_CASE("phi is bounded and glog finite")
    {
        const Shape z = presets::zhole_annulus();
        const double xi = 0.1;
        const Grid2 g = enlarged_domain(z, xi, 240);
        const PhaseField pf = smooth(rasterize(z, g), xi);
        double lo = 1.0, hi = 0.0, min_reg = 1.0;
        for (double v : pf.phi.data()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            min_reg = std::min(min_reg, v + kLogEpsilon);
        }
        CHECK(lo >= 0.0);
        CHECK(hi <= 1.0);
        CHECK(min_reg > 0.0);
        CHECK(pf.glogx.all_finite());
        CHECK(pf.glogy.all_finite());
    }

    TEST_CASE("phi matches chi away from the boundary")
    {
        const double xi = 0.05;
        const Shape a = presets::annulus();
        const Grid2 g = enlarged_domain(a, xi, 400);
        const Field2 chi = rasterize(a, g);
        const PhaseField pf = smooth(chi, xi);
        double worst = 0.0;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const double r = std::hypot(g.x(i), g.y(j));
                const double d = std::min(std::abs(r - 1.0), std::abs(r - 2.0));
                if (d > 4.0 * xi)
                    worst = std::max(worst, std::abs(pf.phi(i, j) - chi(i, j)));
            }
        CHECK(worst < 1e-6);
    }

    TEST_CASE("deep-interior error shrinks with xi at fixed eta")
    {
        const Shape a = presets::annulus();
        double previous = INFINITY;
        for (double xi : {0.10, 0.05, 0.025}) {
            const double eta_target = 3.0;
            int n = static_cast<int>(std::lround(eta_target * enlarged_side(bounding_box(a), xi) / xi));
            n += n % 2;
            const Grid2 g = enlarged_domain(a, xi, n);
            const Field2 chi = rasterize(a, g);
            const PhaseField pf = smooth(chi, xi);
            // fixed band: at least 2 xi_max = 0.2 from both rims
            double worst = 0.0;
            for (int j = 0; j < g.ny(); ++j)
                for (int i = 0; i < g.nx(); ++i) {
                    const double r = std::hypot(g.x(i), g.y(j));
                    const double d = std::min(std::abs(r - 1.0), std::abs(r - 2.0));
                    if (d > 0.2)
                        worst = std::max(worst, std::abs(pf.phi(i, j) - chi(i, j)));
                }
            CAPTURE(xi);
            CHECK(worst < previous);
            previous = worst;
        }
    }

    TEST_CASE("1D step: half value at the interface and quadrature profile")
    {
        for (double eta_target : {3.0, 4.0, 6.0}) {
            const double xi = 0.1;
            const StepCase c = step_case(xi, eta_target);
            const double h = c.grid.dx();
            CAPTURE(eta_target);
            // phi at the interface, interpolated between the two nearest points
            int i0 = 0;
            while (c.grid.x(i0 + 1) <= 0.0)
                ++i0;
            const double w = (0.0 - c.grid.x(i0)) / h;
            const double at_interface = (1 - w) * c.pf.phi(i0, c.row) + w * c.pf.phi(i0 + 1, c.row);
            CHECK(std::abs(at_interface - 0.5) <= h / xi);
            for (int i = 0; i < c.grid.nx(); ++i) {
                const double x = c.grid.x(i);
                if (std::abs(x) < 0.5)
                    REQUIRE(std::abs(c.pf.phi(i, c.row) - oracle::step_profile(x, xi)) <= h / xi);
            }
        }
    }

    TEST_CASE("interface width is 1.81 xi")
    {
        const double oracle_width = oracle::step_width_10_90(1.0);
        // closed form 2 erfinv(0.8) for the kernel exp(-x^2/xi^2)
        CHECK(oracle_width == doctest::Approx(1.8124).epsilon(1e-4));
        for (double eta_target : {3.0, 4.0, 5.0}) {
            const double xi = 0.1;
            const StepCase c = step_case(xi, eta_target);
            const double width = crossing(c, 0.1) - crossing(c, 0.9);
            CAPTURE(eta_target);
            CHECK(width == doctest::Approx(oracle_width * xi).epsilon(0.10));
        }
    }

    TEST_CASE("half-cell translation leaves phi unchanged")
    {
        const double xi = 0.1;
        const Shape s = Shape::circle(0.0, 0.0, 1.0);
        const Grid2 g = enlarged_domain(s, xi, 96);
        const double shift = 0.5 * g.dx();
        const Grid2 moved(g.nx(), g.ny(), g.lx(), g.ly(), g.x0() + shift, g.y0() + shift);
        const Shape s_moved = Shape::circle(shift, shift, 1.0);
        const PhaseField a = smooth(rasterize(s, g), xi);
        const PhaseField b = smooth(rasterize(s_moved, moved), xi);
        double diff = 0.0;
        for (std::size_t k = 0; k < a.phi.size(); ++k)
            diff = std::max(diff, std::abs(a.phi[k] - b.phi[k]));
        CHECK(diff < 1e-12);
    }

    TEST_CASE("glog points inward across the interface")
    {
        const StepCase c = step_case(0.1, 4.0);
        int i0 = 0;
        while (c.grid.x(i0) < 0.0)
            ++i0;
        CHECK(c.pf.glogx(i0, c.row) < 0.0);
        CHECK(std::abs(c.pf.glogy(i0, c.row)) < 1e-6);
    }

    TEST_CASE("margin and input contracts")
    {
        const Grid2 g = make_grid(32, 32, 2.0, 2.0, -1.0, -1.0);
        CHECK_THROWS_AS(smooth(Field2(g, 1.0), 0.05), MarginError);
        CHECK_THROWS_AS(smooth(rasterize(Shape::circle(0, 0, 0.6), g), 0.05), MarginError);
        CHECK_NOTHROW(smooth(rasterize(Shape::circle(0, 0, 0.4), g), 0.05));
        Field2 soft(g);
        soft(16, 16) = 0.5;
        CHECK_THROWS_AS(smooth(soft, 0.05), std::invalid_argument);
        CHECK_THROWS_AS(smooth(Field2(g), 0.0), std::invalid_argument);
    }

    TEST_CASE("advective term trivial cases")
    {
        const double xi = 0.1;
        const Shape s = Shape::circle(0.0, 0.0, 0.5);
        const Grid2 g = enlarged_domain(s, xi, 64);
        SpectralEngine engine(g);
        const PhaseField pf = smooth(rasterize(s, g), xi, engine);
        const Field2 u = sample(g, [](double x, double y) { return std::sin(3 * x) + y * y; });
        CHECK(advective_term(uniform_phase_field(g, xi), engine, u, 1.0).max_abs() == 0.0);
        CHECK(advective_term(pf, engine, Field2(g, 3.0), 1.0).max_abs() < 1e-10);
        CHECK(advective_term(pf, engine, u, 0.0).max_abs() == 0.0);
        const Field2 t1 = advective_term(pf, engine, u, 1.0);
        const Field2 t2 = advective_term(pf, engine, u, 2.5);
        for (std::size_t k = 0; k < t1.size(); ++k)
            REQUIRE(t2[k] == doctest::Approx(2.5 * t1[k]));
    }
}
