#pragma once

#include "ssb/geometry.hpp"
#include "ssb/grid.hpp"
#include "ssb/models.hpp"
#include "ssb/phasefield.hpp"
#include "ssb/stepper.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ssb {

// Steady state of du/dt = lap u - r cos(2 theta) on 1 <= r <= 2 with no-flux
// walls: (r^3/5 - 31 r^2/50 - 8/(25 r^2)) cos(2 theta).
double steady_annulus_radial(double r);
double steady_annulus_radial_derivative(double r);
double steady_annulus(double r, double theta);
double steady_annulus_xy(double x, double y);

// max |g(r)| over [r_in, r_out] by a dense scan (|cos 2 theta| reaches 1 on
// both the full and the quarter annulus).
double steady_annulus_max_abs(double r_in = 1.0, double r_out = 2.0, int samples = 200001);

struct ErrorReport {
    double E = 0.0; // max |U - exact| over the domain
    double e = 0.0; // E / max |exact|
    double reference_max = 0.0;
    double xi = 0.0;
    double eta = 0.0;
    int N = 0;
    double t_final = 0.0;
    std::size_t points = 0;
    Field2 error; // |U - exact| inside the domain, 0 outside
};

// Errors over grid points with chi == 1. When reference_max is not given the
// denominator is max |exact| over those points.
ErrorReport error_report(const Field2& U, const std::function<double(double, double)>& exact, const Field2& chi,
                         std::optional<double> reference_max = std::nullopt);

// Periodic bilinear interpolation.
double interpolate(const Field2& f, double x, double y);

// max |n . grad U| over `samples` points on the boundary of `shape`, with
// grad U computed spectrally and interpolated bilinearly.
double boundary_flux(const Field2& U, const PhaseField& pf, const Shape& shape, int samples);
double boundary_flux(const Field2& U, const Domain& domain, int samples);

// Brute-force periodic oracle: forward Euler with the 5-point Laplacian and
// step dt / refinement. No embedded boundary.
std::vector<Field2> reference_solve(const ReactionModel& model, std::vector<Field2> u0, double t_end, double dt,
                                    int refinement);

// Heat-equation benchmark on the annulus or quarter annulus.
struct HeatCase {
    std::string preset = "annulus";
    double xi = 0.05;
    int N = 400;
    double dt = 0.0; // 0: default_dt
    double t_final = 6.0;
    Scheme scheme = Scheme::strang;
};

struct HeatResult {
    ErrorReport report;
    Field2 u;
    Field2 chi;
    PhaseField pf;
    Shape shape;
    double dt;
    double wall_seconds;
};

// Grid resolution (even) for a target eta: N = eta * side / xi.
int resolution_for_eta(const Box& box, double xi, double eta);
bool is_heat_preset(const std::string& name);
HeatResult run_heat_case(const HeatCase& c);

struct SweepRow {
    double xi = 0.0;
    double eta = 0.0;
    int N = 0;
    double t_final = 0.0;
    double E = 0.0;
    double e = 0.0;
    double wall_seconds = 0.0;
    std::string failure; // empty on success
};

struct SweepOptions {
    int jobs = 1;
    double dt = 0.0; // 0: default_dt per cell
    double t_final = 6.0;
    Scheme scheme = Scheme::strang;
    // Called after each finished cell (from the worker thread, serialized).
    std::function<void(const SweepRow&)> progress;
};

// Rows come back in (xi, eta) input order regardless of jobs. Failed cells
// carry NaN errors and a message instead of aborting the sweep.
std::vector<SweepRow> convergence_sweep(const std::string& preset, const std::vector<double>& xi_list,
                                        const std::vector<double>& eta_list, const SweepOptions& options = {});

// Header: xi,eta,N,t_final,E,e,wall_seconds
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

} // namespace ssb
