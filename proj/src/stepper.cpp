#include "ssb/stepper.hpp"
#include "ssb/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssb {

SplitStepper::SplitStepper(ReactionModel model, PhaseField pf, double dt)
    : model_(std::move(model)), pf_(std::move(pf)), dt_(dt), engine_(pf_.grid())
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("time step must be positive");
    if (model_.n_components() == 0 || model_.diffusivity.size() != model_.n_components() || !model_.rates)
        throw std::invalid_argument("reaction model is incomplete");
    for (double d : model_.diffusivity)
        if (!(d >= 0.0))
            throw std::invalid_argument("diffusivities must be non-negative");

    const Grid2& g = pf_.grid();
    xs_.resize(static_cast<std::size_t>(g.nx()));
    ys_.resize(static_cast<std::size_t>(g.ny()));
    for (int i = 0; i < g.nx(); ++i)
        xs_[static_cast<std::size_t>(i)] = g.x(i);
    for (int j = 0; j < g.ny(); ++j)
        ys_[static_cast<std::size_t>(j)] = g.y(j);

    const std::size_t n = model_.n_components();
    spectra_.resize(n);
    gx_.resize(g.size());
    gy_.resize(g.size());
    for (auto* v : {&star_, &mid_, &n1_, &n2_})
        v->assign(n, Field2(g));

    if (model_.stationary) {
        source_.assign(n, Field2(g));
        std::vector<double> zero(n, 0.0), rate(n, 0.0);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                model_.rates(zero, xs_[static_cast<std::size_t>(i)], ys_[static_cast<std::size_t>(j)], 0.0, rate);
                for (std::size_t c = 0; c < n; ++c)
                    source_[c](i, j) = rate[c];
            }
    }
}

void SplitStepper::require_state(const SolverState& state) const
{
    if (state.fields.size() != model_.n_components())
        throw std::invalid_argument("state has the wrong number of components");
    for (const auto& f : state.fields)
        require_same_grid(f.grid(), grid(), "stepper state");
}

void SplitStepper::check_finite(const std::vector<Field2>& fields, const char* substep, double t) const
{
    for (std::size_t c = 0; c < fields.size(); ++c) {
        const auto data = fields[c].data();
        // x * 0 is 0 for finite x and NaN otherwise; locate only on failure.
        double probe = 0.0;
        for (double v : data)
            probe += v * 0.0;
        if (probe == 0.0)
            continue;
        for (std::size_t k = 0; k < data.size(); ++k)
            if (!std::isfinite(data[k])) {
                const int nx = grid().nx();
                throw NonFiniteError(substep, model_.names[c], static_cast<int>(k % static_cast<std::size_t>(nx)),
                                     static_cast<int>(k / static_cast<std::size_t>(nx)), t);
            }
    }
}

void SplitStepper::evaluate_nonlinear(const std::vector<Field2>& u, const std::vector<Spectrum>* spectra, double t,
                                      std::vector<Field2>& out)
{
    const std::size_t n = model_.n_components();
    const Grid2& g = grid();

    for (std::size_t c = 0; c < n; ++c) {
        auto dst = out[c].data();
        const double d = model_.diffusivity[c];
        if (d == 0.0) {
            std::fill(dst.begin(), dst.end(), 0.0);
            continue;
        }
        const Spectrum* spec = nullptr;
        if (spectra) {
            spec = &(*spectra)[c];
        } else {
            engine_.forward(u[c].data(), work_spectrum_);
            spec = &work_spectrum_;
        }
        engine_.gradient_from_spectrum(*spec, gx_, gy_);
        const auto lx = pf_.glogx.data();
        const auto ly = pf_.glogy.data();
        for (std::size_t k = 0; k < dst.size(); ++k)
            dst[k] = d * (lx[k] * gx_[k] + ly[k] * gy_[k]);
    }

    if (!source_.empty()) {
        for (std::size_t c = 0; c < n; ++c) {
            auto dst = out[c].data();
            auto src = source_[c].data();
            for (std::size_t k = 0; k < dst.size(); ++k)
                dst[k] += src[k];
        }
        return;
    }

    double local[8];
    double rate[8];
    std::vector<double> local_heap, rate_heap;
    std::span<double> ls(local, n), rs(rate, n);
    if (n > 8) {
        local_heap.resize(n);
        rate_heap.resize(n);
        ls = local_heap;
        rs = rate_heap;
    }
    for (int j = 0; j < g.ny(); ++j) {
        const double y = ys_[static_cast<std::size_t>(j)];
        for (int i = 0; i < g.nx(); ++i) {
            const std::size_t k = g.index(i, j);
            for (std::size_t c = 0; c < n; ++c)
                ls[c] = u[c][k];
            model_.rates(ls, xs_[static_cast<std::size_t>(i)], y, t, rs);
            for (std::size_t c = 0; c < n; ++c)
                out[c][k] += rs[c];
        }
    }
}

std::vector<Field2> SplitStepper::nonlinear(const std::vector<Field2>& u, double t)
{
    if (u.size() != model_.n_components())
        throw std::invalid_argument("nonlinear: wrong number of components");
    for (const auto& f : u)
        require_same_grid(f.grid(), grid(), "nonlinear");
    std::vector<Field2> out(u.size(), Field2(grid()));
    evaluate_nonlinear(u, nullptr, t, out);
    return out;
}

void SplitStepper::open_half_step(const std::vector<Field2>& fields, double dt, double t)
{
    for (std::size_t c = 0; c < model_.n_components(); ++c) {
        const double d = model_.diffusivity[c];
        auto src = fields[c].data();
        auto dst = star_[c].data();
        if (d == 0.0) {
            std::copy(src.begin(), src.end(), dst.begin());
            continue;
        }
        engine_.forward(src, spectra_[c]);
        const auto mult = engine_.propagator(d, 0.5 * dt);
        for (std::size_t k = 0; k < mult.size(); ++k)
            spectra_[c][k] *= mult[k];
        engine_.inverse(spectra_[c], dst);
    }
    check_finite(star_, "first diffusion half-step", t);
}

void SplitStepper::nonlinear_update(double dt, double t)
{
    const std::size_t n = model_.n_components();
    evaluate_nonlinear(star_, &spectra_, t + 0.5 * dt, n1_);
    for (std::size_t c = 0; c < n; ++c) {
        auto s = star_[c].data();
        auto a = n1_[c].data();
        auto m = mid_[c].data();
        for (std::size_t k = 0; k < m.size(); ++k)
            m[k] = s[k] + a[k] * (0.5 * dt);
    }
    check_finite(mid_, "nonlinear half increment", t);
    evaluate_nonlinear(mid_, nullptr, t + dt, n2_);
    for (std::size_t c = 0; c < n; ++c) {
        auto s = star_[c].data();
        auto b = n2_[c].data();
        for (std::size_t k = 0; k < s.size(); ++k)
            s[k] += b[k] * dt;
    }
    check_finite(star_, "nonlinear step", t);
}

void SplitStepper::close_half_step(std::vector<Field2>& fields, double dt, double t)
{
    for (std::size_t c = 0; c < model_.n_components(); ++c) {
        const double d = model_.diffusivity[c];
        auto src = star_[c].data();
        auto dst = fields[c].data();
        if (d == 0.0) {
            std::copy(src.begin(), src.end(), dst.begin());
            continue;
        }
        engine_.forward(src, spectra_[c]);
        const auto mult = engine_.propagator(d, 0.5 * dt);
        for (std::size_t k = 0; k < mult.size(); ++k)
            spectra_[c][k] *= mult[k];
        engine_.inverse_consume(spectra_[c], dst);
    }
    check_finite(fields, "second diffusion half-step", t);
}

void SplitStepper::bridge_step(double dt, double t)
{
    for (std::size_t c = 0; c < model_.n_components(); ++c) {
        const double d = model_.diffusivity[c];
        if (d == 0.0)
            continue;
        auto field = star_[c].data();
        engine_.forward(field, spectra_[c]);
        const auto mult = engine_.propagator(d, dt);
        for (std::size_t k = 0; k < mult.size(); ++k)
            spectra_[c][k] *= mult[k];
        engine_.inverse(spectra_[c], field);
    }
    check_finite(star_, "diffusion step", t);
}

void SplitStepper::strang_step(SolverState& state, double dt)
{
    advance(state, 1, dt, Scheme::strang);
}

void SplitStepper::advance(SolverState& state, long steps, double dt, Scheme scheme)
{
    require_state(state);
    if (!(dt > 0.0))
        throw std::invalid_argument("step size must be positive");
    if (steps < 0)
        throw std::invalid_argument("step count must be non-negative");
    if (steps == 0)
        return;
    const double t0 = state.t;
    if (scheme == Scheme::euler) {
        for (long k = 0; k < steps; ++k) {
            euler_step(state, dt);
            state.t = t0 + static_cast<double>(k + 1) * dt;
        }
        return;
    }

    open_half_step(state.fields, dt, t0);
    for (long k = 0; k < steps; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        nonlinear_update(dt, t);
        if (k + 1 < steps)
            bridge_step(dt, t + dt);
    }
    close_half_step(state.fields, dt, t0 + static_cast<double>(steps) * dt);
    state.t = t0 + static_cast<double>(steps) * dt;
    state.step_count += steps;
}

void SplitStepper::euler_step(SolverState& state, double dt)
{
    require_state(state);
    if (!(dt > 0.0))
        throw std::invalid_argument("step size must be positive");
    const std::size_t n = model_.n_components();
    const int hx = engine_.spectral_nx();
    const Grid2& g = grid();

    for (std::size_t c = 0; c < n; ++c) {
        auto lap = mid_[c].data();
        if (model_.diffusivity[c] == 0.0) {
            std::fill(lap.begin(), lap.end(), 0.0);
            continue;
        }
        engine_.forward(state.fields[c].data(), spectra_[c]);
        work_spectrum_.resize(spectra_[c].size());
        const auto kx2 = engine_.kx_squared();
        const auto ky2 = engine_.ky_squared();
        for (int j = 0; j < g.ny(); ++j)
            for (int col = 0; col < hx; ++col) {
                const std::size_t idx =
                    static_cast<std::size_t>(j) * static_cast<std::size_t>(hx) + static_cast<std::size_t>(col);
                work_spectrum_[idx] = -(kx2[static_cast<std::size_t>(col)] + ky2[static_cast<std::size_t>(j)]) *
                                      model_.diffusivity[c] * spectra_[c][idx];
            }
        engine_.inverse(work_spectrum_, lap);
    }
    evaluate_nonlinear(state.fields, &spectra_, state.t, n1_);
    for (std::size_t c = 0; c < n; ++c) {
        auto u = state.fields[c].data();
        auto lap = mid_[c].data();
        auto a = n1_[c].data();
        for (std::size_t k = 0; k < u.size(); ++k)
            u[k] += (lap[k] + a[k]) * dt;
    }
    check_finite(state.fields, "Euler step", state.t);
    state.t += dt;
    ++state.step_count;
}

void SplitStepper::step(SolverState& state, double dt, Scheme scheme)
{
    if (scheme == Scheme::strang)
        strang_step(state, dt);
    else
        euler_step(state, dt);
}

double default_dt(const ReactionModel& model, const Grid2& grid)
{
    double d_max = 0.0;
    for (double d : model.diffusivity)
        d_max = std::max(d_max, d);
    const double h = std::min(grid.dx(), grid.dy());
    const double diffusive = d_max > 0.0 ? 0.25 * h * h / d_max : std::numeric_limits<double>::infinity();
    const double dt = std::min(diffusive, model.max_dt);
    if (!std::isfinite(dt))
        throw std::invalid_argument("cannot derive a default time step for this model");
    return dt;
}

SolverState run(SplitStepper& stepper, SolverState state, double t_end, int snapshot_every, const Observer& observer,
                Scheme scheme)
{
    if (!(t_end >= state.t))
        throw std::invalid_argument("t_end must not precede the current time");
    if (snapshot_every < 1)
        throw std::invalid_argument("snapshot cadence must be at least one step");

    const double dt = stepper.dt();
    const double t0 = state.t;
    const double span = t_end - t0;
    // Full steps plus one shortened step; tiny remainders are round-off.
    long full = static_cast<long>(std::floor(span / dt));
    double rest = span - static_cast<double>(full) * dt;
    if (rest > dt * (1.0 - 1e-9)) {
        ++full;
        rest = 0.0;
    }
    if (rest < 1e-9 * dt)
        rest = 0.0;

    long last_observed = -1;
    const auto observe = [&] {
        if (observer && last_observed != state.step_count) {
            observer(state);
            last_observed = state.step_count;
        }
    };

    observe();
    long done = 0;
    while (done < full) {
        // Run up to the next observation point in one fused batch.
        long batch = full - done;
        if (observer) {
            const long to_next = snapshot_every - state.step_count % snapshot_every;
            batch = std::min(batch, to_next);
        }
        stepper.advance(state, batch, dt, scheme);
        done += batch;
        state.t = (done == full && rest == 0.0) ? t_end : t0 + static_cast<double>(done) * dt;
        if (state.step_count % snapshot_every == 0)
            observe();
    }
    if (rest > 0.0) {
        stepper.step(state, rest, scheme);
        state.t = t_end;
    }
    observe();
    return state;
}

} // namespace ssb
