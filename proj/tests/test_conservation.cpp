#include "ssb/analysis.hpp"
#include "ssb/geometry.hpp"
#include "ssb/phasefield.hpp"
#include "ssb/stepper.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace ssb;

namespace {

// Largest |M(t) - M(0)| / sum(phi |u0|) over t in [0, 6] for source-free
// diffusion on the annulus, M = sum(phi u) dx dy.
double mass_drift(double xi, double eta_target)
{
    const Shape ring = presets::annulus();
    const int n = resolution_for_eta(bounding_box(ring), xi, eta_target);
    const Grid2 g = enlarged_domain(ring, xi, n);
    const PhaseField pf = smooth(rasterize(ring, g), xi);
    const double cell = g.dx() * g.dy();
    auto mass = [&](const Field2& u) {
        double m = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            m += pf.phi[k] * u[k];
        return m * cell;
    };

    Field2 u0 = sample(g, [](double x, double) { return x * x; });
    double scale = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        scale += pf.phi[k] * std::abs(u0[k]);
    scale *= cell;

    const double m0 = mass(u0);
    double drift = 0.0;
    SplitStepper stepper(pure_diffusion(1.0), pf, std::min(g.dx() * g.dx(), xi * xi / 18.0));
    SolverState s{0.0, {std::move(u0)}, 0};
    run(stepper, std::move(s), 6.0, 200, [&](const SolverState& st) {
        drift = std::max(drift, std::abs(mass(st.fields[0]) - m0) / scale);
    });
    return drift;
}

} // namespace

TEST_SUITE("conservation")
{
    TEST_CASE("smoothed mass drift is small and shrinks with xi" * doctest::skip())
    {
        const double coarse = mass_drift(0.1, 4);
        const double fine = mass_drift(0.05, 4);
        MESSAGE("drift xi=0.1: " << coarse << ", xi=0.05: " << fine);
        CHECK(fine < 0.005);
        CHECK(fine < coarse);
    }
}
