#pragma once

#include "ssb/grid.hpp"
#include "ssb/models.hpp"
#include "ssb/phasefield.hpp"
#include "ssb/spectral.hpp"

#include <functional>
#include <vector>

namespace ssb {

struct SolverState {
    double t = 0.0;
    std::vector<Field2> fields; // one per model component, shared grid
    long step_count = 0;
};

enum class Scheme { strang, euler };

// Time integrator for du/dt = L u + N(u, t) with L u = D lap u and
// N(u, t) = grad log(phi + eps) . D grad u + f(u, x, y, t).
//
// strang_step: U* = exp(L dt/2) U, U** = U* + N(U* + N(U*, t + dt/2) dt/2, t + dt) dt,
// U_next = exp(L dt/2) U**. The linear half-steps are exact in Fourier space;
// components with D = 0 skip them.
class SplitStepper {
public:
    SplitStepper(ReactionModel model, PhaseField pf, double dt);

    double dt() const { return dt_; }
    const ReactionModel& model() const { return model_; }
    const PhaseField& phase_field() const { return pf_; }
    const Grid2& grid() const { return pf_.grid(); }
    SpectralEngine& engine() { return engine_; }

    void strang_step(SolverState& state) { strang_step(state, dt_); }
    void strang_step(SolverState& state, double dt);
    void euler_step(SolverState& state) { euler_step(state, dt_); }
    void euler_step(SolverState& state, double dt);
    void step(SolverState& state, double dt, Scheme scheme);

    // `steps` consecutive steps of size dt. For the Strang scheme the closing
    // half-step of one step and the opening half-step of the next are applied
    // as one full-step propagator, which saves two transforms per step; the
    // result matches repeated strang_step up to round-off.
    void advance(SolverState& state, long steps, double dt, Scheme scheme = Scheme::strang);

    // N(u, t) for every component.
    std::vector<Field2> nonlinear(const std::vector<Field2>& u, double t);

private:
    using Spectrum = SpectralEngine::Spectrum;

    void require_state(const SolverState& state) const;
    // out_j = N_j(u, t); when `spectra` is given, spectra[j] holds the
    // transform of u_j for every diffusing component.
    void evaluate_nonlinear(const std::vector<Field2>& u, const std::vector<Spectrum>* spectra, double t,
                            std::vector<Field2>& out);
    void check_finite(const std::vector<Field2>& fields, const char* substep, double t) const;
    // star_ = exp(L dt/2) fields, leaving the spectrum of star_ in spectra_.
    void open_half_step(const std::vector<Field2>& fields, double dt, double t);
    // star_ <- star_ + N(star_ + N(star_, t + dt/2) dt/2, t + dt) dt
    void nonlinear_update(double dt, double t);
    // fields = exp(L dt/2) star_
    void close_half_step(std::vector<Field2>& fields, double dt, double t);
    // star_ = exp(L dt) star_ (closing half of one step, opening half of the next).
    void bridge_step(double dt, double t);

    ReactionModel model_;
    PhaseField pf_;
    double dt_;
    SpectralEngine engine_;
    std::vector<double> xs_, ys_;
    std::vector<Spectrum> spectra_;
    Spectrum work_spectrum_;
    AlignedVector<double> gx_, gy_;
    std::vector<Field2> star_, mid_, n1_, n2_;
    std::vector<Field2> source_; // sampled rates of a stationary model
};

// 0.25 dx^2 / max D, capped by the model's reaction time-step limit.
double default_dt(const ReactionModel& model, const Grid2& grid);

using Observer = std::function<void(const SolverState&)>;

// Steps until t_end (the last step is shortened to land on t_end exactly).
// The observer sees the initial state, every `snapshot_every`-th step, and
// the final state.
SolverState run(SplitStepper& stepper, SolverState state, double t_end, int snapshot_every,
                const Observer& observer = {}, Scheme scheme = Scheme::strang);

} // namespace ssb
