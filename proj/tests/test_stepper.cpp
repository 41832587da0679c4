#include "ssb/error.hpp"
#include "ssb/geometry.hpp"
#include "ssb/stepper.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

using namespace ssb;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_diff(const Field2& a, const Field2& b)
{
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

ReactionModel two_species_inert()
{
    ReactionModel m;
    m.id = "inert";
    m.names = {"a", "b"};
    m.diffusivity = {1.0, 0.0};
    m.rates = [](std::span<const double>, double, double, double, std::span<double> r) { r[0] = r[1] = 0.0; };
    return m;
}

SolverState state_of(std::vector<Field2> fields) { return SolverState{0.0, std::move(fields), 0}; }

// Allen-Cahn on the periodic square [0, 2pi)^2 with phi == 1.
Field2 ac_initial(const Grid2& g)
{
    return sample(g, [](double x, double y) { return 0.8 * std::sin(x) * std::cos(y) + 0.3 * std::cos(2 * x); });
}

Field2 ac_solution(double dt)
{
    const Grid2 g = make_grid(32, 32, kTwoPi, kTwoPi);
    SplitStepper s(allen_cahn(0.1), uniform_phase_field(g, 0.1), dt);
    return run(s, state_of({ac_initial(g)}), 1.0, 1).fields[0];
}

} // namespace

TEST_SUITE("stepper")
{
    TEST_CASE("pure diffusion of cos x is exact for any dt")
    {
        const Grid2 g = make_grid(32, 32, kTwoPi, kTwoPi);
        const Field2 exact = sample(g, [](double x, double) { return std::exp(-1.0) * std::cos(x); });
        for (double dt : {1.0, 0.25, 0.01, 0.3}) {
            SplitStepper s(pure_diffusion(1.0), uniform_phase_field(g, 0.1), dt);
            const SolverState out = run(s, state_of({sample(g, [](double x, double) { return std::cos(x); })}), 1.0, 1);
            CAPTURE(dt);
            CHECK(out.t == 1.0);
            CHECK(max_diff(out.fields[0], exact) < 1e-11);
        }
    }

    TEST_CASE("non-diffusing inert component is untouched")
    {
        const Grid2 g = make_grid(16, 16, kTwoPi, kTwoPi);
        const Field2 a = sample(g, [](double x, double y) { return std::sin(x + y); });
        const Field2 b = sample(g, [](double x, double y) { return std::exp(std::cos(3 * x)) * y; });
        SplitStepper s(two_species_inert(), uniform_phase_field(g, 0.1), 0.05);
        SolverState st = state_of({a, b});
        for (int k = 0; k < 7; ++k)
            s.strang_step(st);
        CHECK(max_diff(st.fields[1], b) == 0.0);
        const Field2 exact = sample(g, [](double x, double y) { return std::exp(-2 * 0.35) * std::sin(x + y); });
        CHECK(max_diff(st.fields[0], exact) < 1e-13);
        CHECK(st.step_count == 7);
        CHECK(st.t == doctest::Approx(0.35));
    }

    TEST_CASE("fused advance matches repeated single steps")
    {
        const Shape c = Shape::circle(0.0, 0.0, 1.0);
        const Grid2 g = enlarged_domain(c, 0.1, 64);
        const PhaseField pf = smooth(rasterize(c, g), 0.1);
        const Field2 u0 = sample(g, [](double x, double y) { return std::tanh(3 * x * y); });
        SplitStepper s(allen_cahn(0.2), pf, 1e-3);
        SolverState a = state_of({u0}), b = state_of({u0});
        for (int k = 0; k < 25; ++k)
            s.strang_step(a);
        s.advance(b, 25, 1e-3);
        CHECK(max_diff(a.fields[0], b.fields[0]) < 1e-12);
        CHECK(a.step_count == b.step_count);
        CHECK(a.t == doctest::Approx(b.t).epsilon(1e-14));
    }

    TEST_CASE("Strang is second order and Euler first order in dt")
    {
        const Field2 ref = ac_solution(1.0 / 1280);
        auto order = [&](auto solve) {
            const double e1 = max_diff(solve(1.0 / 20), ref);
            const double e2 = max_diff(solve(1.0 / 40), ref);
            return std::log2(e1 / e2);
        };
        CHECK(order(ac_solution) == doctest::Approx(2.0).epsilon(0.1));

        const Grid2 g = make_grid(32, 32, kTwoPi, kTwoPi);
        auto euler = [&](double dt) {
            SplitStepper s(allen_cahn(0.1), uniform_phase_field(g, 0.1), dt);
            return run(s, state_of({ac_initial(g)}), 1.0, 1, {}, Scheme::euler).fields[0];
        };
        CHECK(order(euler) == doctest::Approx(1.0).epsilon(0.15));
    }

    TEST_CASE("nonlinear term vanishes for phi == 1 and no reaction")
    {
        const Grid2 g = make_grid(16, 16, 1.0, 1.0);
        SplitStepper s(pure_diffusion(2.0), uniform_phase_field(g, 0.1), 0.1);
        const auto n = s.nonlinear({sample(g, [](double x, double y) { return std::sin(kTwoPi * x) * y; })}, 0.0);
        CHECK(n[0].max_abs() == 0.0);
    }

    TEST_CASE("run: no steps when t_end equals t")
    {
        const Grid2 g = make_grid(16, 16, 1.0, 1.0);
        SplitStepper s(pure_diffusion(1.0), uniform_phase_field(g, 0.1), 0.01);
        int calls = 0;
        const SolverState out = run(s, state_of({Field2(g, 1.0)}), 0.0, 5, [&](const SolverState& st) {
            ++calls;
            CHECK(st.step_count == 0);
        });
        CHECK(calls == 1);
        CHECK(out.step_count == 0);
    }

    TEST_CASE("run: 3.5 steps become 4 with a truncated last step")
    {
        const Grid2 g = make_grid(16, 16, kTwoPi, kTwoPi);
        const double dt = 0.1;
        SplitStepper s(pure_diffusion(1.0), uniform_phase_field(g, 0.1), dt);
        std::vector<double> seen;
        const SolverState out = run(s, state_of({sample(g, [](double x, double) { return std::cos(x); })}), 3.5 * dt, 1,
                                    [&](const SolverState& st) { seen.push_back(st.t); });
        CHECK(out.step_count == 4);
        CHECK(out.t == 3.5 * dt);
        REQUIRE(seen.size() == 5);
        CHECK(seen[3] == doctest::Approx(0.3));
        CHECK(seen[4] == 3.5 * dt);
        CHECK(out.fields[0](0, 0) == doctest::Approx(std::exp(-0.35)).epsilon(1e-12));
    }

    TEST_CASE("run: observer cadence")
    {
        const Grid2 g = make_grid(16, 16, 1.0, 1.0);
        SplitStepper s(pure_diffusion(1.0), uniform_phase_field(g, 0.1), 0.01);
        std::vector<long> steps;
        run(s, state_of({Field2(g)}), 0.105, 4, [&](const SolverState& st) { steps.push_back(st.step_count); });
        CHECK(steps == std::vector<long>{0, 4, 8, 11});
    }

    TEST_CASE("run: preconditions")
    {
        const Grid2 g = make_grid(16, 16, 1.0, 1.0);
        SplitStepper s(pure_diffusion(1.0), uniform_phase_field(g, 0.1), 0.01);
        SolverState st = state_of({Field2(g)});
        st.t = 1.0;
        CHECK_THROWS_AS(run(s, st, 0.5, 1), std::invalid_argument);
        CHECK_THROWS_AS(run(s, state_of({Field2(g)}), 1.0, 0), std::invalid_argument);
        CHECK_THROWS_AS(s.strang_step(st, 0.0), std::invalid_argument);
        SolverState empty;
        CHECK_THROWS_AS(s.strang_step(empty), std::invalid_argument);
    }

    TEST_CASE("blow-up is reported with its location")
    {
        const Grid2 g = make_grid(16, 16, 1.0, 1.0);
        ReactionModel m = pure_diffusion(0.0);
        m.stationary = false;
        m.rates = [](std::span<const double> u, double, double, double, std::span<double> r) {
            r[0] = u[0] > 1e3 ? std::numeric_limits<double>::infinity() : 10.0 * u[0] * u[0];
        };
        SplitStepper s(m, uniform_phase_field(g, 0.1), 0.05);
        Field2 u0(g, 0.0);
        u0(3, 5) = 2.0;
        try {
            run(s, state_of({u0}), 5.0, 1);
            FAIL("expected a blow-up");
        } catch (const NonFiniteError& e) {
            CHECK(e.component() == "u");
            CHECK(e.i() == 3);
            CHECK(e.j() == 5);
            CHECK(e.time() > 0.0);
        }
    }

    TEST_CASE("default time step")
    {
        const Grid2 g = make_grid(100, 100, 5.0, 5.0);
        CHECK(default_dt(heat_with_source(1.0), g) == doctest::Approx(0.25 * 0.05 * 0.05));
        CHECK(default_dt(heat_with_source(4.0), g) == doctest::Approx(0.25 * 0.05 * 0.05 / 4));
        CHECK(default_dt(fenton_karma({}), g) == doctest::Approx(0.02));
        CHECK(default_dt(allen_cahn(0.01), g) == doctest::Approx(0.05));
        CHECK_THROWS_AS(default_dt(pure_diffusion(0.0), g), std::invalid_argument);
    }

    TEST_CASE("state must match the model")
    {
        const Grid2 g = make_grid(16, 16, 1.0, 1.0);
        SplitStepper s(two_species_inert(), uniform_phase_field(g, 0.1), 0.01);
        SolverState one = state_of({Field2(g)});
        CHECK_THROWS_AS(s.strang_step(one), std::invalid_argument);
        SolverState wrong = state_of({Field2(g), Field2(make_grid(16, 16, 2.0, 1.0))});
        CHECK_THROWS_AS(s.strang_step(wrong), std::invalid_argument);
    }
}
